import logging
import threading
from typing import Callable, Dict, Optional

from app.models.relation_basis import RelationBasis

logger = logging.getLogger(__name__)


class RelationBasisRepository:
    """Process-wide cache of relation bases keyed by weight.

    Single writer, many readers: builds happen under a lock, lookups of
    already-built weights do not take it.
    """

    def __init__(self):
        self._bases: Dict[int, RelationBasis] = {}
        self._lock = threading.Lock()

    def get(self, weight: int) -> Optional[RelationBasis]:
        return self._bases.get(weight)

    def get_or_create(self, weight: int, build: Callable[[int], RelationBasis]) -> RelationBasis:
        basis = self._bases.get(weight)
        if basis is not None:
            return basis
        with self._lock:
            basis = self._bases.get(weight)
            if basis is None:
                basis = build(weight)
                self._bases[weight] = basis
                logger.info("relation basis for weight %d: %d relations, rank %d",
                            weight, len(basis.relations), basis.rank)
        return basis

    def weights(self) -> list:
        return sorted(self._bases)

    def clear(self) -> None:
        with self._lock:
            self._bases.clear()


relation_bases = RelationBasisRepository()
