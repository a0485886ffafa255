"""scikit-learn style wrappers around the exponentiality test."""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample
from .stochastic import DEFAULT_SEED, GofReport, gof_exponentiality


class MeanScaler(TransformerMixin, BaseEstimator):
    """Divide nonnegative data by the mean seen in ``fit``."""

    def fit(self, X, y=None):
        x = check_sample(X, name="X")
        mean = x.mean()
        if not mean > 0:
            raise ValueError("X must have a positive mean")
        self.mean_ = mean
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        return check_sample(X, name="X") / self.mean_


class ExponentialityTest(BaseEstimator):
    """Goodness-of-fit test of exponentiality as an estimator.

    ``fit`` runs :func:`expochar.stochastic.gof_exponentiality` on a 1-D sample
    (or a single column). It stores ``report_``, ``statistic_`` and
    ``pvalue_``.

    Parameters
    ----------
    n : int
        Subset size of the sum-versus-maximum comparison.
    B : int
        Number of resampled subsets per cloud.
    statistic : {"ks", "cvm"}
    M_null : int
        Unit-exponential replicates used to calibrate the p-value.
    seed : int
    n_jobs : int or None
        Parallelism for the null calibration. It does not change the result.

    Examples
    --------
    >>> import numpy as np
    >>> x = np.random.default_rng(0).exponential(2.0, 200)
    >>> test = ExponentialityTest(M_null=99, B=500).fit(x)
    >>> 0 < test.pvalue_ <= 1
    True
    """

    def __init__(self, n=3, B=2000, statistic="ks", M_null=500, seed=DEFAULT_SEED, n_jobs=None):
        self.n = n
        self.B = B
        self.statistic = statistic
        self.M_null = M_null
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        report = gof_exponentiality(
            X,
            n=self.n,
            B=self.B,
            statistic_kind=self.statistic,
            M_null=self.M_null,
            seed=self.seed,
            n_jobs=self.n_jobs,
        )
        self.report_: GofReport = report
        self.statistic_ = report.value
        self.pvalue_ = report.p_value
        self.n_features_in_ = 1
        return self

    def reject(self, alpha: float = 0.05) -> bool:
        check_is_fitted(self, "report_")
        return bool(self.pvalue_ <= alpha)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = True
        return tags

