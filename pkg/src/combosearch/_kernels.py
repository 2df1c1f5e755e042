"""Hot inner kernel of the pairwise update, in two interchangeable backends.

The per-iteration cost of the search is one pass over the whole probability
vector: decode each flat index to its per-dimension value indices, count how
many unordered dimension pairs it shares with the sampled combination, and
scale its mass by the corresponding factor. The numba backend fuses all of
that into one loop without materialising the (total x ndim) digits matrix;
the numpy backend is the fallback and the reference for equivalence tests.

Backend selection, resolved once at import:

    COMBOSEARCH_BACKEND=numpy   force the pure-numpy path
    COMBOSEARCH_BACKEND=numba   require numba (warn + fall back if missing)
    unset                       numba when importable, numpy otherwise

Both backends produce bit-identical results: shared-pair counts are integer
arithmetic, and both index the same precomputed factor table, so every mass
is updated by the same IEEE multiply.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via COMBOSEARCH_BACKEND=numpy
    numba = None
    HAVE_NUMBA = False


def _resolve_backend() -> str:
    requested = os.environ.get("COMBOSEARCH_BACKEND", "").strip().lower()
    if requested not in ("", "numpy", "numba"):
        warnings.warn(
            f"COMBOSEARCH_BACKEND={requested!r} not recognised, using default",
            RuntimeWarning,
        )
        requested = ""
    if requested == "numpy":
        return "numpy"
    if requested == "numba" and not HAVE_NUMBA:
        warnings.warn(
            "COMBOSEARCH_BACKEND=numba but numba is not importable; "
            "falling back to numpy",
            RuntimeWarning,
        )
        return "numpy"
    if requested == "numba":
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


BACKEND = _resolve_backend()


def shared_pair_counts_numpy(digits: np.ndarray, sampled: np.ndarray) -> np.ndarray:
    """Shared-pair count of every row of `digits` against `sampled`.

    A combination agreeing with the sampled one on `a` dimensions shares
    exactly C(a, 2) unordered dimension pairs with it.
    """
    agree = (digits == sampled).sum(axis=1)
    return (agree * (agree - 1)) // 2


def apply_update_numpy(
    u: np.ndarray,
    digits: np.ndarray,
    sampled: np.ndarray,
    factor_pows: np.ndarray,
    once: bool,
) -> None:
    """Scale `u` in place by the pairwise factors (numpy backend)."""
    p = shared_pair_counts_numpy(digits, sampled)
    if once:
        u *= np.where(p > 0, factor_pows[1], 1.0)
    else:
        u *= factor_pows[p]


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def apply_update_numba(u, radices, sampled, factor_pows, once):  # pragma: no cover
        total = u.shape[0]
        ndim = radices.shape[0]
        for flat in range(total):
            rem = flat
            agree = 0
            for j in range(ndim - 1, -1, -1):
                idx = rem % radices[j]
                rem //= radices[j]
                if idx == sampled[j]:
                    agree += 1
            pairs = (agree * (agree - 1)) // 2
            if pairs > 0:
                if once:
                    u[flat] *= factor_pows[1]
                else:
                    u[flat] *= factor_pows[pairs]

else:  # pragma: no cover

    def apply_update_numba(u, radices, sampled, factor_pows, once):
        raise RuntimeError("numba backend requested but numba is not installed")


def apply_pair_update(u, space, sampled_indices, factor: float, once: bool) -> None:
    """Multiply every entry sharing >= 1 dimension pair with the sampled
    combination by `factor` (or `factor**pairs` when `once` is false).

    Mutates `u` in place. Excluded entries hold exactly 0.0 and stay 0.0.
    """
    max_pairs = space.ndim * (space.ndim - 1) // 2
    factor_pows = float(factor) ** np.arange(max_pairs + 1, dtype=np.float64)
    sampled = np.asarray(sampled_indices, dtype=np.int64)
    if BACKEND == "numba":
        apply_update_numba(u, space.radices, sampled, factor_pows, once)
    else:
        apply_update_numpy(u, space.digits_matrix, sampled, factor_pows, once)
