from typing import List, Sequence, Tuple

import numpy as np

from .base_critic import Critic
from ..core.errors import InputValidationError

WEIGHT_TOLERANCE = 1e-12


class MixtureCritic(Critic):
    """
    Finite mixture log2 sum_i w_i 2^{delta_i(x)}.

    Valid whenever every component is valid and the weights sum to at most
    one. Dominates each component: score >= delta_i + log2 w_i.
    """

    kind = 'mixture'

    def __init__(self, components: Sequence[Tuple[Critic, float]]):
        if not components:
            raise InputValidationError("a mixture needs at least one component")
        critics = [critic for critic, _ in components]
        weights = np.array([weight for _, weight in components], dtype=float)
        if np.any(weights <= 0):
            raise InputValidationError(f"mixture weights must be positive, got {weights.tolist()}")
        if weights.sum() > 1.0 + WEIGHT_TOLERANCE:
            raise InputValidationError(f"mixture weights sum to {weights.sum()}, more than 1")
        source = critics[0].source
        for critic in critics[1:]:
            if critic.source != source:
                raise InputValidationError(
                    f"{critic.kind} critic is declared against {critic.source}, expected {source}"
                )

        super().__init__(source, {
            'weights': weights.tolist(),
            'components': [critic.describe() for critic in critics],
        })
        self.components: List[Critic] = critics
        self.log_weights = np.log2(weights)

    def supports_length(self, n: int) -> bool:
        return all(critic.supports_length(n) for critic in self.components)

    def score(self, block: np.ndarray) -> float:
        terms = [critic.score(block) + w for critic, w in zip(self.components, self.log_weights)]
        return float(np.logaddexp2.reduce(terms))

    def score_many(self, blocks: np.ndarray) -> np.ndarray:
        terms = np.stack([
            critic.score_many(blocks) + w for critic, w in zip(self.components, self.log_weights)
        ])
        return np.logaddexp2.reduce(terms, axis=0)


def make_mixture_critic(components: Sequence[Tuple[Critic, float]]) -> MixtureCritic:
    return MixtureCritic(components)
