"""Size guards shared by the engine and the command line front end.

Every guard can be overridden through the ``EQHH_GUARDS`` environment
variable, e.g. ``EQHH_GUARDS="nmax=10,bar_n=6"``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "EQHH_GUARDS"


class GuardError(ValueError):
    """A requested computation exceeds a configured size guard."""


@dataclass(frozen=True)
class Guards:
    max_cyclotomic_order: int = 512
    dense_threshold: int = 64      # component width below which dense Bareiss is used for ranks
    group_bound: int = 512         # largest finite group closure
    kmax: int = 6
    nmax: int = 12
    bar_k: int = 3                 # brute-force bar complex: homological degree
    bar_n: int = 5                 # brute-force bar complex: internal degree
    bar_dim: int = 20000           # brute-force bar complex: largest chain space

    @classmethod
    def from_env(cls, env: str | None = None) -> "Guards":
        raw = os.environ.get(ENV_VAR, "") if env is None else env
        base = cls()
        if not raw.strip():
            return base
        known = {f.name for f in fields(cls)}
        updates = {}
        for item in raw.split(","):
            if not item.strip():
                continue
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"unknown guard {key!r} in {ENV_VAR}")
            updates[key] = int(value)
        return replace(base, **updates)


GUARDS = Guards.from_env()


def set_guards(guards: Guards) -> None:
    global GUARDS
    GUARDS = guards
