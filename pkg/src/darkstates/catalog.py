"""Known closed-form dark vectors of small coherent clusters."""

from typing import Dict, List, Sequence

from src.darkstates.kernel import DarkVector

# Three units, one of each level, with alternating signs
TRIAD = {"120": 1, "102": -1, "210": -1, "201": 1, "012": 1, "021": -1}

# Four-unit vectors that are not a triad times a ground-state unit
FOUR_UNIT = {
    "1210": {"1210": 1, "1201": -1, "1012": -1, "1021": 1,
             "2110": -1, "2101": 1, "0112": 1, "0121": -1},
    "1020": {"1020": 1, "1002": -1, "2010": -1, "2001": 1,
             "0120": -1, "0102": 1, "0210": 1, "0201": -1},
    "1120": {"1120": 1, "1102": -1, "1200": 1, "2100": -1,
             "2011": -1, "0211": 1, "0012": -1, "0021": 1,
             "1210": -1, "1012": 1, "1020": -1, "2101": 1,
             "2010": 1, "0121": -1, "0102": 1, "0201": -1},
}


def embed_triad(units: Sequence[int], ground: int, m: int) -> DarkVector:
    """
    The triad on the given units (1-based, in order), every other unit
    in the ground level `ground` (0 or 1).
    """
    mapping: Dict[str, int] = {}
    for label, c in TRIAD.items():
        levels = [ground] * m
        for unit, ch in zip(units, label):
            levels[unit - 1] = int(ch)
        mapping["".join(map(str, levels))] = c
    name = "triad[" + ",".join(map(str, units)) + f"]+{ground}"
    return DarkVector.from_labels(mapping, name)


def triad_vector() -> DarkVector:
    return DarkVector.from_labels(TRIAD, "triad[1,2,3]")


def four_unit_catalog() -> List[DarkVector]:
    """Triads on every choice of three units with the fourth at 0 or 1, then the three four-unit vectors."""
    placements = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    vectors = [embed_triad(units, ground, 4) for ground in (0, 1) for units in placements]
    vectors.extend(DarkVector.from_labels(mapping, f"four[{key}]") for key, mapping in FOUR_UNIT.items())
    return vectors


def known_dark_vectors(m: int) -> List[DarkVector]:
    if m == 3:
        return [triad_vector()]
    if m == 4:
        return four_unit_catalog()
    return []
