from dataclasses import dataclass
from typing import Dict, Optional

from games.models import DiscountSpec, GameSpec


@dataclass(frozen=True)
class GameDocument:
    """Parsed game file: the game, its discount factors if given, and the state→index assignment."""
    game: GameSpec
    discount: Optional[DiscountSpec] = None
    assignment: Optional[Dict[str, int]] = None
