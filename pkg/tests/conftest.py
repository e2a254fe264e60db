import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ittm.ordinal import ZERO, Ordinal
from ittm.seqreal import canonicalize, finite_support

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


def ordinals(max_depth: int = 2, max_terms: int = 3, max_coef: int = 4):
    """Ordinals in CNF with bounded nesting."""
    if max_depth == 0:
        return st.integers(0, max_coef).map(Ordinal.of)

    def build(pairs):
        pairs = sorted({e: c for e, c in pairs}.items(), key=lambda ec: ec[0], reverse=True)
        return Ordinal(tuple(pairs))

    exps = ordinals(max_depth - 1, max_terms, max_coef)
    return st.lists(st.tuples(exps, st.integers(1, max_coef)), max_size=max_terms).map(build)


bitstrings = lambda lo=0, hi=6: st.text("01", min_size=lo, max_size=hi)

seqreals = st.one_of(
    st.frozensets(st.integers(0, 40), max_size=6).map(finite_support),
    st.tuples(bitstrings(), bitstrings(1, 5)).map(lambda pp: canonicalize(*pp)),
)
