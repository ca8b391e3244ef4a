"""Performance estimators computed from truncated learning curves.

All TSE-family scores follow the convention that lower is better; the
orientation of every estimator is carried by its `EstimatorSpec` instead of
negating scores.
"""
import enum
import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Union
import numpy as np
from framework.core.curves import LearningCurve
from framework.core.curves import epoch_sums
from framework.core.stats import Orientation
from framework.errors import EstimatorUnavailableError
from framework.errors import InvalidInputError

DEFAULT_E = 1
DEFAULT_GAMMA = 0.999
DEFAULT_OVERFIT_THRESHOLD = 0.1
EFFECTIVE_BUDGET_FRACTION = (9, 10)


class EstimatorKind(enum.Enum):
    """The estimators available for ranking architectures."""

    TSE = 'tse'
    TSE_E = 'tse-e'
    TSE_EMA = 'tse-ema'
    SOVL = 'sovl'
    SOVL_E = 'sovl-e'
    SOVACC = 'sovacc'
    VACC_ES = 'vacc-es'
    TLMINI = 'tlmini'
    PAC_BAYES = 'pacbayes'

    @property
    def orientation(self) -> Orientation:
        """Get the orientation of the scores of this estimator."""
        if self in (EstimatorKind.VACC_ES, EstimatorKind.SOVACC):
            return Orientation.HIGHER_IS_BETTER
        return Orientation.LOWER_IS_BETTER


_PARAMETER_ALIASES = {
    'T': 'T',
    'E': 'E',
    'g': 'gamma',
    'gamma': 'gamma',
    'a': 'a',
    'b': 'b',
    'd': 'delta',
    'delta': 'delta'
}


@dataclass(frozen=True)
class EstimatorSpec:
    """An estimator together with its hyperparameters.

    `T` may be left unset; a rank-evaluation grid then supplies it through
    `with_budget`.
    """

    kind: EstimatorKind
    T: Optional[int] = None
    E: int = DEFAULT_E
    gamma: float = DEFAULT_GAMMA
    a: float = 0.0
    b: float = 1.0
    delta: float = 0.1

    def __post_init__(self):
        """Validate the hyperparameters."""
        if self.T is not None and (isinstance(self.T, bool) or
                                   int(self.T) != self.T or self.T < 1):
            raise InvalidInputError("T must be a positive integer, got {}".format(
                self.T))
        if int(self.E) != self.E or self.E < 1:
            raise InvalidInputError("E must be a positive integer, got {}".format(
                self.E))
        if self.kind in (EstimatorKind.TSE_E, EstimatorKind.SOVL_E
                         ) and self.T is not None and self.E > self.T:
            raise InvalidInputError("E={} exceeds T={}".format(self.E, self.T))
        if not 0.0 < self.gamma <= 1.0:
            raise InvalidInputError("gamma must be in (0, 1], got {}".format(
                self.gamma))
        if not 0.0 < self.delta <= 1.0:
            raise InvalidInputError("delta must be in (0, 1], got {}".format(
                self.delta))
        if not self.a < self.b:
            raise InvalidInputError("a must be lower than b, got a={}, b={}".format(
                self.a, self.b))

    @property
    def orientation(self) -> Orientation:
        """Get the orientation of the scores."""
        return self.kind.orientation

    @property
    def is_vector(self) -> bool:
        """Return True when the estimator yields one score per minibatch."""
        return self.kind is EstimatorKind.TLMINI

    def with_budget(self, T: int) -> 'EstimatorSpec':
        """Get a copy of the spec using the provided budget."""
        return replace(self, T=int(T))

    @property
    def family_label(self) -> str:
        """Get the label of the spec without its budget."""
        parameters = self.__parameters()
        if len(parameters) == 0:
            return self.kind.value
        return "{}@{}".format(self.kind.value, ",".join(parameters))

    @property
    def label(self) -> str:
        """Get the canonical string of the spec, as accepted by `parse_estimator_spec`."""
        parameters = self.__parameters()
        if self.T is not None:
            parameters.insert(0, "T={}".format(self.T))
        if len(parameters) == 0:
            return self.kind.value
        return "{}@{}".format(self.kind.value, ",".join(parameters))

    def __parameters(self):
        if self.kind in (EstimatorKind.TSE_E, EstimatorKind.SOVL_E):
            return ["E={}".format(self.E)]
        if self.kind is EstimatorKind.TSE_EMA:
            return ["g={:g}".format(self.gamma)]
        if self.kind is EstimatorKind.PAC_BAYES:
            return [
                "a={:g}".format(self.a), "b={:g}".format(self.b),
                "d={:g}".format(self.delta)
            ]
        return []


def parse_estimator_spec(text: str,
                          defaults: Optional[Mapping[str, float]] = None
                          ) -> EstimatorSpec:
    """Parse an estimator spec such as `tse-ema@T=10,g=0.999`.

    Parameters
    ----------
    text: str, required
        The estimator name, optionally followed by `@` and comma-separated
        `key=value` hyperparameters (T, E, g/gamma, a, b, d/delta).
    defaults: mapping of str to number, optional
        Hyperparameters used when the text does not set them, keyed by
        EstimatorSpec field name.

    Returns
    -------
    spec: EstimatorSpec
        The parsed spec.
    """
    name, _, parameter_text = text.strip().partition('@')
    try:
        kind = EstimatorKind(name.strip().lower())
    except ValueError:
        valid = ", ".join(k.value for k in EstimatorKind)
        raise InvalidInputError(
            "unknown estimator '{}'; valid estimators: {}".format(
                name, valid)) from None
    values = dict(defaults or {})
    for part in filter(None, (p.strip() for p in parameter_text.split(','))):
        key, separator, value = part.partition('=')
        key = _PARAMETER_ALIASES.get(key.strip())
        if key is None or not separator:
            raise InvalidInputError(
                "cannot parse parameter '{}' of estimator '{}'".format(
                    part, text))
        try:
            values[key] = int(value) if key in ('T', 'E') else float(value)
        except ValueError:
            raise InvalidInputError("invalid value for {} in '{}'".format(
                key, text)) from None
    return EstimatorSpec(kind=kind, **values)


def tse(curve: LearningCurve, T: int) -> float:
    """Compute the Training Speed Estimate: the sum of the first T epoch sums.

    Parameters
    ----------
    curve: LearningCurve, required
        The learning curve.
    T: int, required
        The budget in epochs; 1 <= T <= curve.t_end.

    Returns
    -------
    score: float
        The estimate; lower is better.
    """
    curve.check_budget(T)
    return float(np.sum(epoch_sums(curve)[:T]))


def tse_e(curve: LearningCurve, T: int, E: int) -> float:
    """Compute TSE over the last E epochs before the budget T.

    Parameters
    ----------
    curve: LearningCurve, required
        The learning curve.
    T: int, required
        The budget in epochs; E <= T <= curve.t_end.
    E: int, required
        The window size; 1 <= E <= T.

    Returns
    -------
    score: float
        The sum of epoch sums T-E+1..T; lower is better.
    """
    curve.check_budget(T)
    if isinstance(E, bool) or int(E) != E or not 1 <= E <= T:
        raise InvalidInputError("E must be an integer in [1, {}], got {}".format(
            T, E))
    return float(np.sum(epoch_sums(curve)[T - E:T]))


def tse_ema(curve: LearningCurve, T: int, gamma: float) -> float:
    """Compute TSE with exponentially decaying weights gamma^(T-t).

    Parameters
    ----------
    curve: LearningCurve, required
        The learning curve.
    T: int, required
        The budget in epochs.
    gamma: float, required
        The decay rate, in (0, 1].

    Returns
    -------
    score: float
        The weighted sum of epoch sums; lower is better.
    """
    curve.check_budget(T)
    if not 0.0 < gamma <= 1.0:
        raise InvalidInputError("gamma must be in (0, 1], got {}".format(gamma))
    weights = np.power(float(gamma), np.arange(T - 1, -1, -1, dtype=np.float64))
    return float(np.sum(weights * epoch_sums(curve)[:T]))


def _validation_losses(curve: LearningCurve) -> np.ndarray:
    if curve.epoch_val_loss is None:
        raise EstimatorUnavailableError("validation losses unavailable")
    return curve.epoch_val_loss


def _validation_accuracies(curve: LearningCurve) -> np.ndarray:
    if curve.epoch_val_acc is None:
        raise EstimatorUnavailableError("validation accuracies unavailable")
    return curve.epoch_val_acc


def sovl(curve: LearningCurve, T: int) -> float:
    """Compute the sum of the validation losses of the first T epochs; lower is better."""
    val_losses = _validation_losses(curve)
    curve.check_budget(T)
    return float(np.sum(val_losses[:T]))


def sovl_e(curve: LearningCurve, T: int, E: int) -> float:
    """Compute the sum of the validation losses of epochs T-E+1..T; lower is better."""
    val_losses = _validation_losses(curve)
    curve.check_budget(T)
    if int(E) != E or not 1 <= E <= T:
        raise InvalidInputError("E must be an integer in [1, {}], got {}".format(
            T, E))
    return float(np.sum(val_losses[T - E:T]))


def sovacc(curve: LearningCurve, T: int) -> float:
    """Compute the sum of the validation accuracies of the first T epochs; higher is better."""
    accuracies = _validation_accuracies(curve)
    curve.check_budget(T)
    return float(np.sum(accuracies[:T]))


def vacc_es(curve: LearningCurve, T: int) -> float:
    """Get the validation accuracy at epoch T; higher is better."""
    curve.check_budget(T)
    return float(_validation_accuracies(curve)[T - 1])


def tlmini_scores(curve: LearningCurve, T: int) -> np.ndarray:
    """Get the B minibatch losses of epoch T.

    The scores are compared across architectures per minibatch index; see
    `framework.core.evaluation.tlmini_rank_correlation`.

    Parameters
    ----------
    curve: LearningCurve, required
        The learning curve.
    T: int, required
        The epoch, 1-based.

    Returns
    -------
    scores: array of shape (B,)
        The losses of the epoch, in minibatch order; lower is better.
    """
    curve.check_budget(T)
    return np.array(curve.minibatch_train_losses[T - 1])


def pac_bayes_bound(sum_nll: float, n: int, a: float, b: float,
                    delta: float) -> float:
    """Estimate the PAC-Bayes bound on the expected loss from a sum of losses.

    The bound is a + c * (1 - e^a * (e^(-sum_nll) * delta)^(1/n)) with
    c = (b - a) / (1 - e^(a - b)); the power is evaluated in log space.

    Parameters
    ----------
    sum_nll: float, required
        The sum of n negative log likelihoods, each in [a, b].
    n: int, required
        The number of summed terms.
    a: float, required
        The lower bound of a single loss.
    b: float, required
        The upper bound of a single loss; a < b.
    delta: float, required
        The confidence parameter, in (0, 1].

    Returns
    -------
    bound: float
        The bound estimate, in [a, a + c]; lower is better.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer, got {}".format(n))
    if not a < b:
        raise InvalidInputError("a must be lower than b, got a={}, b={}".format(
            a, b))
    if not 0.0 < delta <= 1.0:
        raise InvalidInputError("delta must be in (0, 1], got {}".format(delta))
    if not math.isfinite(sum_nll) or sum_nll < n * a:
        raise InvalidInputError(
            "sum_nll must be finite and >= n*a = {}, got {}".format(
                n * a, sum_nll))
    c = (b - a) / -math.expm1(a - b)
    exponent = a + (math.log(delta) - sum_nll) / n
    return a + c * -math.expm1(min(exponent, 0.0))


def pac_bayes_score(curve: LearningCurve, T: int, a: float, b: float,
                    delta: float) -> float:
    """Apply the PAC-Bayes bound estimate to the first T epochs of a curve.

    Every recorded minibatch loss up to epoch T counts as one term, so
    n = T * B.
    """
    curve.check_budget(T)
    losses = curve.minibatch_train_losses[:T]
    return pac_bayes_bound(float(np.sum(losses)), int(losses.size), a, b,
                           delta)


def score(spec: EstimatorSpec,
          curve: LearningCurve) -> Union[float, np.ndarray]:
    """Compute the score of a curve under the provided estimator spec.

    Parameters
    ----------
    spec: EstimatorSpec, required
        The estimator and its hyperparameters; `spec.T` must be set.
    curve: LearningCurve, required
        The learning curve.

    Returns
    -------
    score: float or numpy.ndarray
        The raw score; a vector for TLmini.
    """
    if spec.T is None:
        raise InvalidInputError("estimator {} has no budget T".format(
            spec.label))
    T = spec.T
    kind = spec.kind
    if kind is EstimatorKind.TSE:
        return tse(curve, T)
    if kind is EstimatorKind.TSE_E:
        return tse_e(curve, T, spec.E)
    if kind is EstimatorKind.TSE_EMA:
        return tse_ema(curve, T, spec.gamma)
    if kind is EstimatorKind.SOVL:
        return sovl(curve, T)
    if kind is EstimatorKind.SOVL_E:
        return sovl_e(curve, T, spec.E)
    if kind is EstimatorKind.SOVACC:
        return sovacc(curve, T)
    if kind is EstimatorKind.VACC_ES:
        return vacc_es(curve, T)
    if kind is EstimatorKind.TLMINI:
        return tlmini_scores(curve, T)
    return pac_bayes_score(curve, T, spec.a, spec.b, spec.delta)


def overfit_epoch(curve: LearningCurve, threshold: float) -> int:
    """Get the first epoch whose mean minibatch loss drops below the threshold.

    Parameters
    ----------
    curve: LearningCurve, required
        A fully trained curve.
    threshold: float, required
        The overfitting threshold.

    Returns
    -------
    epoch: int
        The 1-based epoch of the first crossing, or t_end if there is none.
    """
    below = np.flatnonzero(epoch_sums(curve) < threshold)
    if below.size == 0:
        return curve.t_end
    return int(below[0]) + 1


def effective_budget(curves: Sequence[LearningCurve],
                     threshold: float = DEFAULT_OVERFIT_THRESHOLD,
                     t_end: Optional[int] = None) -> int:
    """Find the effective training budget for the TSE estimators.

    The budget is 90% of the earliest overfitting epoch among the curves,
    rounded down and clamped to at least one epoch.

    Parameters
    ----------
    curves: sequence of LearningCurve, required
        Fully trained curves; at least one.
    threshold: float, optional
        The overfitting threshold on the mean epoch loss.
    t_end: int, optional
        The number of epochs every curve must have; defaults to that of the first curve.

    Returns
    -------
    budget: int
        The effective budget in epochs.
    """
    curves = list(curves)
    if len(curves) == 0:
        raise InvalidInputError("at least one curve is required")
    if not threshold > 0:
        raise InvalidInputError("threshold must be positive, got {}".format(
            threshold))
    if t_end is None:
        t_end = curves[0].t_end
    for curve in curves:
        if curve.t_end != t_end:
            raise InvalidInputError(
                "every curve must be trained for t_end={} epochs".format(t_end))
    t_overfit = min(overfit_epoch(curve, threshold) for curve in curves)
    numerator, denominator = EFFECTIVE_BUDGET_FRACTION
    return max(1, (numerator * t_overfit) // denominator)
