"""Estimator-style front end over the sampling engine.

``BayesianMixture`` follows the scikit-learn protocol (``fit`` /
``predict`` / ``score_samples`` / ``get_params`` / ``set_params``) without
depending on scikit-learn, so it composes with tools that clone estimators
or build pipelines. ``fit`` runs the configured chain on the data;
``labels_`` is the Binder-loss point clustering of the training data, and
``predict`` assigns new points to the clusters of that same partition.
"""

import copy

import numpy as np

from . import postprocess
from ._validation import check_data_matrix
from .algorithms import ALGORITHM_IDS, build_algorithm
from .chainio import MemoryCollector
from .hierarchy import HIERARCHY_TYPES, build_hierarchy
from .mixings import MIXING_TYPES, build_mixing

_PARAM_NAMES = (
    "hier_type",
    "hier_params",
    "mix_type",
    "mix_params",
    "algorithm",
    "iterations",
    "burnin",
    "init_num_clusters",
    "n_aux",
    "random_state",
)


class BayesianMixture:
    """Bayesian mixture model fitted by MCMC posterior simulation.

    Parameters
    ----------
    hier_type : str, default="NNIG"
        Component family, one of ``NNIG``, ``NNxIG``, ``LapNIG``, ``NNW``,
        ``GammaGamma``.
    hier_params : dict, optional
        Hyperparameters (the ``fixed_values`` block, plus optional
        ``updater`` / ``step_size`` / ``num_steps``). When omitted,
        data-driven defaults are derived at fit time.
    mix_type : str, default="DP"
        Prior on the weights: ``DP``, ``PY`` or ``TruncSB``.
    mix_params : dict, optional
        Mixing parameters; defaults are derived when omitted.
    algorithm : str, default="Neal2"
        One of ``Neal2``, ``Neal3``, ``Neal8``, ``BlockedGibbs``.
    iterations, burnin : int
        Total and discarded numbers of MCMC iterations.
    init_num_clusters : int, default=3
        Number of clusters in the striped initial allocation.
    n_aux : int, default=3
        Auxiliary draws per datum (Neal8 only).
    random_state : int, default=0
        Seed of the sampling generator.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Binder-loss point estimate of the training partition.
    n_clusters_ : int
        Number of clusters in ``labels_``.
    num_clusters_chain_ : ndarray
        Number of clusters at each retained iteration.
    similarity_matrix_ : ndarray of shape (n_samples, n_samples)
        Posterior co-clustering frequencies.
    """

    def __init__(
        self,
        hier_type="NNIG",
        hier_params=None,
        mix_type="DP",
        mix_params=None,
        algorithm="Neal2",
        iterations=1500,
        burnin=500,
        init_num_clusters=3,
        n_aux=3,
        random_state=0,
    ):
        self.hier_type = hier_type
        self.hier_params = hier_params
        self.mix_type = mix_type
        self.mix_params = mix_params
        self.algorithm = algorithm
        self.iterations = iterations
        self.burnin = burnin
        self.init_num_clusters = init_num_clusters
        self.n_aux = n_aux
        self.random_state = random_state

    # -- scikit-learn parameter protocol ---------------------------------

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in _PARAM_NAMES}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in _PARAM_NAMES:
                raise ValueError(f"unknown parameter '{name}'")
            setattr(self, name, value)
        return self

    # -- defaults ----------------------------------------------------------

    def _default_hier_params(self, X):
        d = X.shape[1]
        if self.hier_type == "NNIG":
            return {
                "fixed_values": {
                    "mean": float(X.mean()),
                    "var_scaling": 0.1,
                    "shape": 2.0,
                    "scale": max(float(X.var()), 1e-6),
                }
            }
        if self.hier_type in ("NNxIG", "LapNIG"):
            return {
                "fixed_values": {
                    "mean": float(X.mean()),
                    "var": max(float(X.var()), 1e-6) * 10.0,
                    "shape": 2.0,
                    "scale": max(float(X.var()), 1e-6),
                }
            }
        if self.hier_type == "NNW":
            variances = np.maximum(X.var(axis=0), 1e-6)
            scale = np.diag(variances)
            return {
                "fixed_values": {
                    "mean": {"size": d, "data": [float(v) for v in X.mean(axis=0)]},
                    "var_scaling": 0.01,
                    "deg_free": float(d + 2),
                    "scale": {
                        "rows": d,
                        "cols": d,
                        "data": [float(v) for v in scale.reshape(-1)],
                        "rowmajor": True,
                    },
                }
            }
        # GammaGamma: exponential kernel with a weak prior on the rate
        return {"fixed_values": {"shape": 1.0, "rate_alpha": 2.0, "rate_beta": 2.0}}

    def _default_mix_params(self):
        if self.mix_type == "DP":
            return {"fixed_value": {"totalmass": 1.0}}
        if self.mix_type == "PY":
            return {"fixed_values": {"strength": 1.0, "discount": 0.1}}
        return {"num_components": 25, "totalmass": 1.0}

    # -- fitting -----------------------------------------------------------

    def fit(self, X, y=None):
        """Run the chain on X and derive the point clustering."""
        if self.algorithm not in ALGORITHM_IDS:
            raise ValueError(f"unknown algorithm '{self.algorithm}'")
        if self.hier_type not in HIERARCHY_TYPES:
            raise ValueError(f"unknown hierarchy type '{self.hier_type}'")
        if self.mix_type not in MIXING_TYPES:
            raise ValueError(f"unknown mixing type '{self.mix_type}'")
        X = check_data_matrix(X, "X")
        hier_params = self.hier_params or self._default_hier_params(X)
        mix_params = self.mix_params or self._default_mix_params()
        hierarchy = build_hierarchy(self.hier_type, hier_params)
        mixing = build_mixing(self.mix_type, mix_params)
        self.algorithm_ = build_algorithm(
            self.algorithm,
            hierarchy,
            mixing,
            init_num_clusters=self.init_num_clusters,
            n_aux=self.n_aux,
        )
        self.collector_ = MemoryCollector()
        rng = np.random.default_rng(self.random_state)
        self.algorithm_.run(X, self.iterations, self.burnin, self.collector_, rng)

        self.n_features_in_ = X.shape[1]
        self.similarity_matrix_ = postprocess.similarity_matrix(self.collector_)
        self.num_clusters_chain_ = postprocess.num_clusters_chain(self.collector_)
        self._select_point_estimate()
        self.n_clusters_ = len(set(self.labels_.tolist()))
        return self

    def _select_point_estimate(self):
        best_record, best_loss = None, np.inf
        for record in self.collector_:
            loss = postprocess.binder_loss(record.allocations, self.similarity_matrix_)
            if loss < best_loss:
                best_record, best_loss = record, loss
        self.best_record_ = best_record
        self.labels_ = best_record.allocations.copy()

    def _check_fitted(self):
        if not hasattr(self, "algorithm_"):
            raise ValueError("this estimator is not fitted yet; call fit first")

    def __sklearn_is_fitted__(self):
        return hasattr(self, "algorithm_")

    # -- inference on new data ----------------------------------------------

    def predict(self, X):
        """Assign rows of X to the clusters of the point-estimate partition."""
        self._check_fitted()
        X = check_data_matrix(X, "X")
        record = self.best_record_
        template = self.algorithm_.template
        scratch = template.likelihood.clone_empty()
        state_cls = type(template.state)
        n = record.allocations.shape[0]
        k = len(record.cluster_states)
        mixing = copy.copy(self.algorithm_.mixing)
        mixing.set_state_params(record.mixing_params)
        if mixing.is_conditional():
            log_w = mixing.get_weights(log=True)
        scores = np.full((k, X.shape[0]), -np.inf)
        for h, cs in enumerate(record.cluster_states):
            if cs.cardinality == 0:
                continue
            if mixing.is_conditional():
                log_mass = log_w[h]
            else:
                log_mass = mixing.mass_existing_cluster(n, cs.cardinality, k, log=True)
            scratch.state = state_cls.from_params(cs.params)
            scores[h] = log_mass + scratch.lpdf_grid(X)
        return scores.argmax(axis=0)

    def score_samples(self, X):
        """Posterior-mean predictive log density at the rows of X."""
        self._check_fitted()
        X = check_data_matrix(X, "X")
        lpdf = self.algorithm_.eval_lpdf_grid(
            self.collector_, X, rng=np.random.default_rng([int(self.random_state), 1])
        )
        return postprocess.log_mean_density(lpdf)

    def score(self, X, y=None):
        """Mean predictive log density of X."""
        return float(np.mean(self.score_samples(X)))

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
