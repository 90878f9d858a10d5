"""Size caps for the expensive constructions, overridable via RELKIT_CAPS."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Caps:
    # largest universe allowed for product/power results
    max_universe: int = 10**6
    # largest total table size (cells) allowed when materializing an algebra
    max_table_cells: int = 10**7
    # universe size up to which relation enumeration filters all candidates
    exhaustive_threshold: int = 5
    # generated-mode enumeration: closure seeds of up to this many pairs
    seed_pairs: int = 2
    # generated-mode enumeration: abort the join closure beyond this count
    max_relations: int = 100_000
    # U-admissible family enumeration: components per family (None = to fixpoint)
    max_components: int | None = 3
    # clone generation caps by arity
    clone_cap_3: int = 50_000
    clone_cap_4: int = 200_000

    def clone_cap(self, arity: int) -> int:
        if arity <= 3:
            return self.clone_cap_3
        return self.clone_cap_4


def caps_from_env(base: Caps | None = None, env: str | None = None) -> Caps:
    """Apply the RELKIT_CAPS override (a JSON object of field:value pairs)."""
    caps = base or Caps()
    raw = os.environ.get("RELKIT_CAPS") if env is None else env
    if not raw:
        return caps
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"RELKIT_CAPS is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("RELKIT_CAPS must be a JSON object")
    known = {f.name for f in fields(Caps)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"RELKIT_CAPS has unknown keys: {sorted(unknown)}")
    return replace(caps, **data)


DEFAULT_CAPS = Caps()
