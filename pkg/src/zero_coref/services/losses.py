"""Training objectives over caller-supplied probabilities, with gradients.

Probabilities are clamped to ``[eps, 1 - eps]`` before taking logarithms.
Gradients are taken with respect to the unclamped inputs and are zero where
the clamp is active.
"""

from collections.abc import Mapping, Sequence, Set

import numpy as np

from zero_coref.core.config import settings
from zero_coref.core.exceptions import EmptyInput, LengthMismatch, MissingGold, NormalizationError
from zero_coref.core.logging import get_logger
from zero_coref.models.schemas import ProbabilityInstance, ProbabilityTable

logger = get_logger(__name__)

Gold = Mapping[str, Set[str]]


def _eps(eps: float | None) -> float:
    return settings.loss_epsilon if eps is None else eps


def _clamp(probs: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Clamped values and a mask of entries inside the clamp range."""
    return np.clip(probs, eps, 1 - eps), (probs >= eps) & (probs <= 1 - eps)


def _gold_mask(instance: ProbabilityInstance, gold: Gold, required: bool) -> np.ndarray:
    correct = gold.get(instance.instance_id)
    if correct is None:
        if required:
            raise MissingGold(f"instance {instance.instance_id} has no gold candidate")
        correct = set()
    mask = np.array([candidate in correct for candidate in instance.candidates])
    if required and not mask.any():
        raise MissingGold(f"no gold candidate of {instance.instance_id} is among its candidates")
    return mask


class LossService:
    """Binary cross-entropy, AZP resolution and coreference marginal losses."""

    @staticmethod
    def _binary_inputs(
        labels: Sequence[int], probs: Sequence[float]
    ) -> tuple[np.ndarray, np.ndarray]:
        if len(labels) != len(probs):
            raise LengthMismatch(f"{len(labels)} labels but {len(probs)} probabilities")
        if not labels:
            raise EmptyInput("binary cross-entropy over zero samples")
        y = np.asarray(labels, dtype=np.float64)
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("labels must be 0 or 1")
        return y, np.asarray(probs, dtype=np.float64)

    @staticmethod
    def loss_bce(labels: Sequence[int], probs: Sequence[float], eps: float | None = None) -> float:
        """Mean binary cross-entropy.

        Raises:
            LengthMismatch: If labels and probabilities differ in length
            EmptyInput: If there are no samples
        """
        y, p = LossService._binary_inputs(labels, probs)
        clamped, _ = _clamp(p, _eps(eps))
        return float(-np.mean(y * np.log(clamped) + (1 - y) * np.log(1 - clamped)))

    @staticmethod
    def loss_bce_grad(
        labels: Sequence[int], probs: Sequence[float], eps: float | None = None
    ) -> np.ndarray:
        y, p = LossService._binary_inputs(labels, probs)
        clamped, inside = _clamp(p, _eps(eps))
        grad = -(y / clamped - (1 - y) / (1 - clamped)) / len(y)
        return np.where(inside, grad, 0.0)

    @staticmethod
    def loss_azp_resolution(table: ProbabilityTable, gold: Gold, eps: float | None = None) -> float:
        """Cross-entropy summed over instances and their correct candidates.

        Raises:
            MissingGold: If an instance has no correct candidate
        """
        total = 0.0
        for instance in table.instances:
            mask = _gold_mask(instance, gold, required=True)
            clamped, _ = _clamp(instance.as_array(), _eps(eps))
            total -= float(np.log(clamped[mask]).sum())
        return total

    @staticmethod
    def loss_azp_resolution_grad(
        table: ProbabilityTable, gold: Gold, eps: float | None = None
    ) -> list[np.ndarray]:
        grads = []
        for instance in table.instances:
            mask = _gold_mask(instance, gold, required=True)
            clamped, inside = _clamp(instance.as_array(), _eps(eps))
            grads.append(np.where(mask & inside, -1.0 / clamped, 0.0))
        return grads

    @staticmethod
    def _check_normalized(instance: ProbabilityInstance) -> None:
        total = sum(instance.probs)
        if abs(total - 1.0) > settings.normalization_tolerance:
            raise NormalizationError(
                f"probabilities of {instance.instance_id} sum to {total:.8f}, not 1"
            )

    @staticmethod
    def loss_coref_marginal(
        table: ProbabilityTable,
        gold: Gold,
        eps: float | None = None,
        check_normalized: bool = True,
    ) -> float:
        """Negative log of the probability mass on gold antecedents, summed over instances.

        An instance whose candidates include no gold antecedent contributes
        ``-log(eps)``.

        Raises:
            NormalizationError: If an instance's probabilities do not sum to one
        """
        epsilon = _eps(eps)
        total = 0.0
        for instance in table.instances:
            if check_normalized:
                LossService._check_normalized(instance)
            mask = _gold_mask(instance, gold, required=False)
            mass = float(instance.as_array()[mask].sum())
            if not mask.any():
                logger.debug(f"No reachable gold antecedent for {instance.instance_id}")
            total -= float(np.log(min(max(mass, epsilon), 1.0)))
        return total

    @staticmethod
    def loss_coref_marginal_grad(
        table: ProbabilityTable, gold: Gold, eps: float | None = None
    ) -> list[np.ndarray]:
        epsilon = _eps(eps)
        grads = []
        for instance in table.instances:
            mask = _gold_mask(instance, gold, required=False)
            mass = float(instance.as_array()[mask].sum())
            if epsilon < mass < 1.0:
                grads.append(np.where(mask, -1.0 / mass, 0.0))
            else:
                grads.append(np.zeros(len(instance.probs)))
        return grads
