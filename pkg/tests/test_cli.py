import xml.etree.ElementTree as ET

import numpy as np
import pytest

from mixmcmc import svgplot
from mixmcmc.chainio import read_csv_matrix
from mixmcmc.cli import main

ALGO_TEXT = """
algo_id: "Neal2"
rng_seed: 20201124
iterations: 300
burnin: 100
init_num_clusters: 3
"""

G0_TEXT = """
fixed_values {
    mean: 0.0
    var_scaling: 0.1
    shape: 2.0
    scale: 2.0
}
"""

DP_TEXT = "fixed_value { totalmass: 1.0 }\n"


def _write_run_inputs(tmp_path, algo_text=ALGO_TEXT):
    (tmp_path / "algo.txt").write_text(algo_text)
    (tmp_path / "g0.txt").write_text(G0_TEXT)
    (tmp_path / "dp.txt").write_text(DP_TEXT)
    rng = np.random.default_rng(0)
    data = np.concatenate([rng.normal(size=40) - 3, rng.normal(size=40) + 3])
    (tmp_path / "data.csv").write_text("".join(f"{float(v)!r}\n" for v in data))
    grid = np.linspace(-6, 6, 120)
    (tmp_path / "grid.csv").write_text("".join(f"{float(v)!r}\n" for v in grid))


def _full_run_args(tmp_path):
    return [
        "run-mcmc",
        "--algo-params-file", str(tmp_path / "algo.txt"),
        "--hier-type", "NNIG",
        "--hier-args", str(tmp_path / "g0.txt"),
        "--mix-type", "DP",
        "--mix-args", str(tmp_path / "dp.txt"),
        "--coll-name", str(tmp_path / "chains.chain"),
        "--data-file", str(tmp_path / "data.csv"),
        "--grid-file", str(tmp_path / "grid.csv"),
        "--dens-file", str(tmp_path / "dens.csv"),
        "--n-cl-file", str(tmp_path / "ncl.csv"),
        "--clus-file", str(tmp_path / "clus.csv"),
        "--best-clus-file", str(tmp_path / "best.csv"),
    ]


def test_full_run_produces_all_outputs(tmp_path):
    _write_run_inputs(tmp_path)
    assert main(_full_run_args(tmp_path)) == 0
    for name in ("chains.chain", "dens.csv", "dens.mean.csv", "ncl.csv", "clus.csv", "best.csv"):
        assert (tmp_path / name).exists(), name
    dens = read_csv_matrix(tmp_path / "dens.csv")
    assert dens.shape == (200, 120)
    ncl = read_csv_matrix(tmp_path / "ncl.csv")
    assert ncl.shape == (200, 1)
    clus = read_csv_matrix(tmp_path / "clus.csv")
    assert clus.shape == (200, 80)
    best = read_csv_matrix(tmp_path / "best.csv")
    assert best.shape == (1, 80)
    mean = read_csv_matrix(tmp_path / "dens.mean.csv")
    assert mean.shape == (1, 120)
    # chain file holds the retained records
    assert sum(1 for _ in open(tmp_path / "chains.chain")) == 200


def test_skip_rule_omits_outputs(tmp_path):
    _write_run_inputs(tmp_path)
    args = [
        "run-mcmc",
        "--algo-params-file", str(tmp_path / "algo.txt"),
        "--hier-type", "NNIG",
        "--hier-args", str(tmp_path / "g0.txt"),
        "--mix-type", "DP",
        "--mix-args", str(tmp_path / "dp.txt"),
        "--coll-name", "memory",
        "--data-file", str(tmp_path / "data.csv"),
        "--n-cl-file", str(tmp_path / "ncl.csv"),
    ]
    assert main(args) == 0
    assert (tmp_path / "ncl.csv").exists()
    assert not (tmp_path / "dens.csv").exists()
    assert not (tmp_path / "clus.csv").exists()
    assert not (tmp_path / "chains.chain").exists()


def test_byte_identical_outputs_across_runs(tmp_path):
    _write_run_inputs(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        out.mkdir()
        args = [
            "run-mcmc",
            "--algo-params-file", str(tmp_path / "algo.txt"),
            "--hier-type", "NNIG",
            "--hier-args", str(tmp_path / "g0.txt"),
            "--mix-type", "DP",
            "--mix-args", str(tmp_path / "dp.txt"),
            "--coll-name", str(out / "chains.chain"),
            "--data-file", str(tmp_path / "data.csv"),
            "--grid-file", str(tmp_path / "grid.csv"),
            "--dens-file", str(out / "dens.csv"),
            "--n-cl-file", str(out / "ncl.csv"),
            "--clus-file", str(out / "clus.csv"),
            "--best-clus-file", str(out / "best.csv"),
        ]
        assert main(args) == 0
    for name in ("chains.chain", "dens.csv", "dens.mean.csv", "ncl.csv", "clus.csv", "best.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_incompatible_model_exits_nonzero(tmp_path, capsys):
    _write_run_inputs(tmp_path)
    (tmp_path / "lap.txt").write_text(
        "fixed_values {\n mean: 0.0\n var: 25.0\n shape: 2.0\n scale: 2.0\n}\n"
    )
    args = [
        "run-mcmc",
        "--algo-params-file", str(tmp_path / "algo.txt"),
        "--hier-type", "LapNIG",
        "--hier-args", str(tmp_path / "lap.txt"),
        "--mix-type", "DP",
        "--mix-args", str(tmp_path / "dp.txt"),
        "--data-file", str(tmp_path / "data.csv"),
    ]
    assert main(args) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file_exits_nonzero(tmp_path, capsys):
    _write_run_inputs(tmp_path)
    args = _full_run_args(tmp_path)
    args[args.index("--data-file") + 1] = str(tmp_path / "missing.csv")
    assert main(args) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_bad_config_exits_nonzero(tmp_path, capsys):
    _write_run_inputs(tmp_path, algo_text='algo_id: "Neal9"\nrng_seed: 1\niterations: 10\nburnin: 1\ninit_num_clusters: 1\n')
    assert main(_full_run_args(tmp_path)) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_plot_writes_three_wellformed_svgs(tmp_path):
    _write_run_inputs(tmp_path)
    assert main(_full_run_args(tmp_path)) == 0
    out_dir = tmp_path / "plots"
    args = [
        "plot",
        "--grid-file", str(tmp_path / "grid.csv"),
        "--dens-file", str(tmp_path / "dens.csv"),
        "--n-cl-file", str(tmp_path / "ncl.csv"),
        "--out-dir", str(out_dir),
    ]
    assert main(args) == 0
    names = ["density.svg", "cluster_count_hist.svg", "cluster_count_trace.svg"]
    for name in names:
        doc = (out_dir / name).read_text()
        root = ET.fromstring(doc)  # well-formed XML
        assert root.tag.endswith("svg")
    # plotting is deterministic
    first = [(out_dir / n).read_bytes() for n in names]
    assert main(args) == 0
    assert [(out_dir / n).read_bytes() for n in names] == first


def test_plot_errors_on_mismatched_inputs(tmp_path, capsys):
    (tmp_path / "grid.csv").write_text("0.0\n1.0\n")
    (tmp_path / "dens.csv").write_text("-1.0,-1.0,-1.0\n")
    (tmp_path / "ncl.csv").write_text("2\n")
    args = [
        "plot",
        "--grid-file", str(tmp_path / "grid.csv"),
        "--dens-file", str(tmp_path / "dens.csv"),
        "--n-cl-file", str(tmp_path / "ncl.csv"),
        "--out-dir", str(tmp_path / "plots"),
    ]
    assert main(args) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_bench_two_normals(tmp_path):
    out = tmp_path / "data.csv"
    args = ["bench", "--kind", "two-normals-1d", "--n", "200", "--seed", "4", "--out", str(out)]
    assert main(args) == 0
    mat = read_csv_matrix(out)
    assert mat.shape == (200, 1)
    assert abs(mat[:100].mean() + 3.0) < 0.5
    assert abs(mat[100:].mean() - 3.0) < 0.5


def test_bench_highdim_statistics(tmp_path):
    out = tmp_path / "hd.csv"
    args = ["bench", "--kind", "highdim", "--n", "10000", "--d", "4", "--seed", "9", "--out", str(out)]
    assert main(args) == 0
    mat = read_csv_matrix(out)
    assert mat.shape == (10000, 4)
    # two equally weighted components at ±2 per coordinate: mean near 0
    assert np.all(np.abs(mat.mean(axis=0)) < 0.1)


def test_bench_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["bench", "--kind", "highdim", "--n", "50", "--d", "3",
                     "--seed", "7", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench_rejects_bad_sizes(tmp_path, capsys):
    assert main(["bench", "--kind", "highdim", "--n", "1", "--d", "2",
                 "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["bench", "--kind", "highdim", "--n", "10", "--d", "0",
                 "--out", str(tmp_path / "x.csv")]) == 1
    capsys.readouterr()


def test_histogram_single_bar():
    doc = svgplot.histogram_svg(np.array([3, 3, 3, 3]))
    root = ET.fromstring(doc)
    rects = [el for el in root.iter() if el.tag.endswith("rect")]
    # one background plus exactly one bar
    assert len(rects) == 2


def test_svg_renderers_reject_empty_series():
    with pytest.raises(ValueError):
        svgplot.histogram_svg(np.array([], dtype=int))
    with pytest.raises(ValueError):
        svgplot.traceplot_svg(np.array([]))
    with pytest.raises(ValueError):
        svgplot.density_curve_svg(np.array([0.0, 1.0]), np.array([1.0]))
