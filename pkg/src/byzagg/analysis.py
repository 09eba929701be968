"""Distortion-fraction analysis: closed forms, brute force, and reports.

For each scheme and attack strength this module computes c, the number of
file votes an optimal (or weak) adversary placement can flip, and the
fraction epsilon = c/f.  The brute-force search certifies the redundant
scheme's closed form on small clusters by scanning disagreement-set
strategies directly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from itertools import combinations

from .adversary import vote_threshold
from .combinatorics import binom
from .errors import CapacityError, ConfigError
from .rng import ATTACK_STREAM, stream_rng

EXHAUSTIVE_LIMIT = 12


def cmax_aspis_att2(k_workers: int, r: int, q: int) -> int:
    """Most files a colluding coalition can flip undetected: C(2q, r)/2."""
    _check_params(k_workers, r, q)
    total = binom(2 * q, r)
    assert total % 2 == 0, "C(2q, r) is even for odd r"
    return total // 2


def c_aspis_att1(r: int, q: int) -> int:
    """Files beyond repair when q loners each distort everything: C(q, r)."""
    if r % 2 == 0:
        raise ConfigError(f"r={r} must be odd")
    return binom(q, r)


def c_detox(k_workers: int, r: int, q: int, mode: str) -> int:
    """Flipped groups under optimal or weak adversary placements."""
    if mode not in ("optimal", "weak"):
        raise ConfigError(f"attack strength {mode!r} not 'optimal' or 'weak'")
    if k_workers % r != 0:
        raise ConfigError(f"r={r} must divide K={k_workers} for grouping")
    _check_params(k_workers, r, q)
    r_prime = vote_threshold(r)
    if mode == "optimal":
        return q // r_prime
    return max(0, q - (k_workers // r) * (r_prime - 1))


def c_baseline(k_workers: int, q: int) -> int:
    """Without redundancy every Byzantine owns exactly one file."""
    if q < 0 or q > k_workers:
        raise ConfigError(f"q={q} must lie in [0, K={k_workers}]")
    return q


def _check_params(k_workers: int, r: int, q: int) -> None:
    if r % 2 == 0:
        raise ConfigError(f"r={r} must be odd")
    if q < 0:
        raise ConfigError(f"q={q} must be non-negative")
    if 2 * q >= k_workers and q > 0:
        raise ConfigError(f"q={q} must satisfy q < K/2 = {k_workers / 2}")


def round_half_up(x: float, places: int = 3) -> float:
    """Half-up decimal rounding for table presentation (not banker's)."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(quantum, rounding=ROUND_HALF_UP))


# ---------------------------------------------------------------------------
# Brute force over disagreement-set strategies
# ---------------------------------------------------------------------------

def _candidate_files(k_workers: int, r: int,
                     adversaries: tuple[int, ...]) -> list[list[tuple[tuple[int, ...], int]]]:
    """Per candidate file, the (active coalition, bystander bitmask) options.

    A file qualifies when it holds at least (r+1)/2 adversaries; an option
    pairs one active sub-coalition A' with the mask of the file's other
    members, who must all sit in the intersection of A's D sets.
    """
    adv = set(adversaries)
    threshold = vote_threshold(r)
    candidates = []
    for file_set in combinations(range(k_workers), r):
        inside = sorted(adv.intersection(file_set))
        if len(inside) < threshold:
            continue
        file_mask = sum(1 << j for j in file_set)
        options = []
        for size in range(threshold, len(inside) + 1):
            for active in combinations(inside, size):
                rest_mask = file_mask & ~sum(1 << a for a in active)
                options.append((active, rest_mask))
        candidates.append(options)
    return candidates


def _count_with_masks(candidates, d_masks: dict[int, int]) -> int:
    count = 0
    for options in candidates:
        for active, rest_mask in options:
            shared = ~0
            for a in active:
                shared &= d_masks[a]
            if rest_mask & ~shared == 0:
                count += 1
                break
    return count


def count_distorted_files(k_workers: int, r: int, adversaries: tuple[int, ...],
                          disagreement_sets: dict[int, frozenset[int]]) -> int:
    """Files some active sub-coalition can flip while hiding inside its D sets.

    A file F is distorted iff it contains a subset A' of adversaries with
    |A'| >= (r+1)/2 such that every other member of F lies in the
    intersection of the D sets of A'.
    """
    candidates = _candidate_files(k_workers, r, adversaries)
    d_masks = {a: sum(1 << j for j in d) for a, d in disagreement_sets.items()}
    return _count_with_masks(candidates, d_masks)


def brute_force_cmax(k_workers: int, r: int, q: int, strategy: str = "common",
                     samples: int = 10000, seed: int = 0) -> int:
    """Maximum distorted-file count over a strategy space.

    'common': exhaustive over one shared D inside the honest workers with
    |D| <= q.  'sampled': seeded random per-adversary D_i draws of size q.
    The adversary set is the first q workers (all placements equivalent
    by symmetry of the all-subsets assignment).
    """
    if k_workers > EXHAUSTIVE_LIMIT:
        raise CapacityError(
            f"K={k_workers} exceeds the exhaustive scan limit {EXHAUSTIVE_LIMIT}"
        )
    _check_params(k_workers, r, q)
    if r % 2 == 0 or r > k_workers:
        raise ConfigError(f"r={r} must be odd and at most K={k_workers}")
    adversaries = tuple(range(q))
    honest = list(range(q, k_workers))
    candidates = _candidate_files(k_workers, r, adversaries)
    best = 0
    if strategy == "common":
        for size in range(0, q + 1):
            for d_set in combinations(honest, size):
                mask = sum(1 << j for j in d_set)
                masks = {a: mask for a in adversaries}
                best = max(best, _count_with_masks(candidates, masks))
        return best
    if strategy != "sampled":
        raise ConfigError(f"strategy {strategy!r} not 'common' or 'sampled'")
    rng = stream_rng(ATTACK_STREAM, seed, k_workers, r, q)
    others = {a: [j for j in range(k_workers) if j != a] for a in adversaries}
    for _ in range(samples):
        masks = {}
        for a in adversaries:
            picked = rng.choice(others[a], size=q, replace=False)
            masks[a] = sum(1 << int(j) for j in picked)
        best = max(best, _count_with_masks(candidates, masks))
    return best


# ---------------------------------------------------------------------------
# Table reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistortionReport:
    scheme: str
    attack: str       # "optimal" or "weak"
    k_workers: int
    r: int
    q: int
    f: int
    c: int

    @property
    def epsilon(self) -> float:
        return self.c / self.f

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "attack": self.attack,
            "K": self.k_workers,
            "r": self.r,
            "q": self.q,
            "f": self.f,
            "c": self.c,
            "epsilon": round_half_up(self.epsilon),
        }


def distortion_reports(k_workers: int, r: int, q_values,
                       schemes=("aspis", "baseline", "detox")) -> list[DistortionReport]:
    """Rows for every (scheme, attack strength, q) on one cluster size."""
    rows = []
    f_aspis = binom(k_workers, r)
    for scheme in schemes:
        if scheme not in ("aspis", "baseline", "detox"):
            raise ConfigError(f"no distortion closed form for scheme {scheme!r}")
        for attack in ("optimal", "weak"):
            for q in q_values:
                if scheme == "aspis":
                    c = (cmax_aspis_att2(k_workers, r, q) if attack == "optimal"
                         else c_aspis_att1(r, q))
                    f = f_aspis
                elif scheme == "baseline":
                    c = c_baseline(k_workers, q)
                    f = k_workers
                else:
                    c = c_detox(k_workers, r, q, attack)
                    f = k_workers // r
                rows.append(DistortionReport(scheme, attack, k_workers, r, q, f, c))
    return rows


def emit_tables(reports: list[DistortionReport]) -> str:
    """CSV with schema scheme,attack,K,r,q,f,c,epsilon (epsilon at 3 decimals)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["scheme", "attack", "K", "r", "q", "f", "c", "epsilon"])
    for row in reports:
        writer.writerow([
            row.scheme, row.attack, row.k_workers, row.r, row.q, row.f, row.c,
            f"{round_half_up(row.epsilon):.3f}",
        ])
    return out.getvalue()
