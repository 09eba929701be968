"""Attack models: Byzantine set selection and distorted gradient returns.

Three modes.  ATT1: each Byzantine independently distorts every file it
holds.  ATT2: the coalition fixes a common disagreement set D inside the
honest workers and distorts exactly the files where it can flip the vote
while disagreeing only with members of D.  ATT3: the set is re-drawn every
byz_window iterations and distorts only files it holds by strict majority,
agreeing with honest workers elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .assignment import TaskAssignment
from .errors import ConfigError, MissingGradientError
from .rng import ATTACK_STREAM, stream_rng

ATTACK_MODES = ("ATT1", "ATT2", "ATT3")
DISTORTION_KINDS = ("alie", "foe", "reversed", "constant")
PLACEMENTS = ("random", "detox_optimal", "detox_weak")


def vote_threshold(r: int) -> int:
    """Copies needed to flip a majority vote among r returns."""
    return (r + 1) // 2


@dataclass(frozen=True)
class DistortionSpec:
    """How a Byzantine worker fabricates a gradient."""

    kind: str = "reversed"
    z: float | None = 1.0        # alie; None selects the quantile preset
    scale: float = 1.0           # reversed factor c, foe factor eps
    fill: float = -1.0           # constant

    def __post_init__(self):
        if self.kind not in DISTORTION_KINDS:
            raise ConfigError(f"distortion kind {self.kind!r} not one of {DISTORTION_KINDS}")
        if self.kind == "reversed" and self.scale <= 0:
            raise ConfigError(f"reversed scale c={self.scale} must be positive")
        if self.kind == "alie" and self.z is not None and not np.isfinite(self.z):
            raise ConfigError(f"alie z={self.z} must be finite")


@dataclass(frozen=True)
class AttackScenario:
    """Attack configuration carried by run configs."""

    mode: str
    q: int
    distortion: DistortionSpec = DistortionSpec()
    disagreement: tuple[int, ...] | None = None   # ATT2 fixed D
    byz_window: int = 50                          # ATT3 refresh span T_b
    placement: str = "random"
    adversaries: tuple[int, ...] | None = None    # explicit override

    def __post_init__(self):
        if self.mode not in ATTACK_MODES:
            raise ConfigError(f"attack mode {self.mode!r} not one of {ATTACK_MODES}")
        if self.q < 0:
            raise ConfigError(f"q={self.q} must be non-negative")
        if self.byz_window < 1:
            raise ConfigError(f"byz_window T_b={self.byz_window} must be at least 1")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"placement {self.placement!r} not one of {PLACEMENTS}")
        if self.disagreement is not None:
            object.__setattr__(self, "disagreement", tuple(sorted(self.disagreement)))
            if len(set(self.disagreement)) != len(self.disagreement):
                raise ConfigError("disagreement set has repeated workers")
            if len(self.disagreement) > self.q:
                raise ConfigError(
                    f"|D|={len(self.disagreement)} exceeds q={self.q}"
                )
        if self.adversaries is not None:
            object.__setattr__(self, "adversaries", tuple(sorted(self.adversaries)))
            if len(self.adversaries) != self.q:
                raise ConfigError(
                    f"explicit adversary set has size {len(self.adversaries)}, expected q={self.q}"
                )


def alie_z_max(k_workers: int, q: int) -> float:
    """Quantile preset: largest z that hides mean + z*sigma inside the crowd."""
    s = k_workers // 2 + 1 - q
    honest = k_workers - q
    if s < 1 or honest <= s:
        raise ConfigError(
            f"alie quantile preset undefined for K={k_workers}, q={q}: "
            f"needs 1 <= floor(K/2)+1-q < K-q"
        )
    return NormalDist().inv_cdf((honest - s) / honest)


def choose_adversaries(mode: str, k_workers: int, q: int, t: int, seed: int, *,
                       byz_window: int = 1, placement: str = "random",
                       r: int | None = None,
                       excluded: tuple[int, ...] = ()) -> tuple[int, ...]:
    """The Byzantine set at iteration t; deterministic given seed.

    ATT1/ATT2 may re-draw every iteration; ATT3 re-draws only when
    t = 0 (mod byz_window).  Deterministic placements fill detox groups
    to maximize (detox_optimal) or minimize (detox_weak) flipped groups.
    """
    if mode not in ATTACK_MODES:
        raise ConfigError(f"attack mode {mode!r} not one of {ATTACK_MODES}")
    if 2 * q >= k_workers and q > 0:
        raise ConfigError(f"q={q} must satisfy q < K/2 = {k_workers / 2}")
    if q == 0:
        return ()
    if placement in ("detox_optimal", "detox_weak"):
        if r is None or k_workers % r != 0:
            raise ConfigError(f"placement {placement!r} needs r dividing K={k_workers}")
        return _detox_placement(k_workers, q, r, placement)
    epoch = t // byz_window if mode == "ATT3" else t
    rng = stream_rng(ATTACK_STREAM, seed, epoch, 0)
    pool = [j for j in range(k_workers) if j not in set(excluded)]
    if len(pool) < q:
        raise ConfigError(f"cannot place q={q} adversaries outside {sorted(excluded)}")
    picked = rng.choice(len(pool), size=q, replace=False)
    return tuple(sorted(pool[i] for i in picked))


def _detox_placement(k_workers: int, q: int, r: int, placement: str) -> tuple[int, ...]:
    groups = k_workers // r
    chosen: list[int] = []
    if placement == "detox_optimal":
        r_prime = vote_threshold(r)
        remaining = q
        for g in range(groups):
            take = min(remaining, r_prime)
            chosen.extend(range(g * r, g * r + take))
            remaining -= take
            if remaining == 0:
                break
    else:
        chosen = [(j % groups) * r + j // groups for j in range(q)]
    return tuple(sorted(chosen))


def choose_disagreement_set(adversaries: tuple[int, ...], k_workers: int, q: int,
                            t: int, seed: int) -> tuple[int, ...]:
    """A q-subset of the honest workers, re-drawn per iteration."""
    honest = [j for j in range(k_workers) if j not in set(adversaries)]
    if len(honest) < q:
        raise ConfigError(f"cannot draw |D|={q} from {len(honest)} honest workers")
    rng = stream_rng(ATTACK_STREAM, seed, t, 1)
    picked = rng.choice(len(honest), size=q, replace=False)
    return tuple(sorted(honest[i] for i in picked))


# ---------------------------------------------------------------------------
# Distortions
# ---------------------------------------------------------------------------

def distort(gradients: np.ndarray, spec: DistortionSpec,
            view: np.ndarray | None = None,
            k_workers: int | None = None, q: int | None = None) -> np.ndarray:
    """Distorted counterparts of the given per-file gradients.

    view is the coalition's visible gradient population for the alie/foe
    statistics; it defaults to the gradients being distorted.
    """
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    view = gradients if view is None else np.atleast_2d(np.asarray(view, dtype=float))
    if spec.kind == "reversed":
        return -spec.scale * gradients
    if spec.kind == "constant":
        return np.full_like(gradients, spec.fill)
    if spec.kind == "foe":
        vec = -spec.scale * view.mean(axis=0)
    else:
        z = spec.z
        if z is None:
            if k_workers is None or q is None:
                raise ConfigError("alie quantile preset needs K and q")
            z = alie_z_max(k_workers, q)
        vec = view.mean(axis=0) + z * view.std(axis=0)
    return np.tile(vec, (gradients.shape[0], 1))


# ---------------------------------------------------------------------------
# Returned gradients
# ---------------------------------------------------------------------------

@dataclass
class GradientTable:
    """Every worker's returned gradient for every file it holds."""

    k_workers: int
    values: dict[tuple[int, int], np.ndarray]
    distorted_files: tuple[int, ...] = ()

    def value(self, worker: int, file: int) -> np.ndarray:
        try:
            return self.values[(worker, file)]
        except KeyError:
            raise MissingGradientError(
                f"worker {worker} never returned a gradient for file {file}"
            ) from None

    @classmethod
    def honest(cls, assignment: TaskAssignment, true_gradients: np.ndarray) -> GradientTable:
        values = {}
        for i, workers in enumerate(assignment.file_workers):
            for j in workers:
                values[(j, i)] = true_gradients[i]
        return cls(k_workers=assignment.k_workers, values=values)


def byzantine_returns(assignment: TaskAssignment, scenario: AttackScenario,
                      adversaries: tuple[int, ...], true_gradients: np.ndarray,
                      disagreement: tuple[int, ...] | None = None) -> GradientTable:
    """Apply the attack on top of honest returns for one iteration."""
    true_gradients = np.asarray(true_gradients, dtype=float)
    table = GradientTable.honest(assignment, true_gradients)
    adv = tuple(sorted(adversaries))
    if not adv:
        return table
    if any(j < 0 or j >= assignment.k_workers for j in adv):
        raise ConfigError(f"adversaries {adv} outside [0, {assignment.k_workers})")
    spec = scenario.distortion
    k, q = assignment.k_workers, len(adv)

    if scenario.mode == "ATT1":
        distorted: set[int] = set()
        for j in adv:
            files = assignment.worker_files[j]
            own_view = true_gradients[list(files)]
            fakes = distort(own_view, spec, k_workers=k, q=q)
            for idx, i in enumerate(files):
                table.values[(j, i)] = fakes[idx]
            distorted.update(files)
        table.distorted_files = tuple(sorted(distorted))
        return table

    adv_set = set(adv)
    if scenario.mode == "ATT2":
        d_set = disagreement if disagreement is not None else scenario.disagreement
        if d_set is None:
            raise ConfigError("ATT2 needs a disagreement set D")
        d_set = tuple(sorted(d_set))
        if len(d_set) > q:
            raise ConfigError(f"|D|={len(d_set)} exceeds q={q}")
        if adv_set & set(d_set):
            raise ConfigError(f"D={d_set} must be disjoint from the adversaries")

    threshold = vote_threshold(assignment.r)
    targets = []
    for i, workers in enumerate(assignment.file_workers):
        inside = adv_set.intersection(workers)
        if len(inside) < threshold:
            continue
        if scenario.mode == "ATT2" and not set(workers).difference(adv_set).issubset(d_set):
            continue
        targets.append(i)

    coalition_files = sorted({i for j in adv for i in assignment.worker_files[j]})
    view = true_gradients[coalition_files]
    fakes = distort(true_gradients[targets], spec, view=view, k_workers=k, q=q)
    for idx, i in enumerate(targets):
        for j in adv_set.intersection(assignment.file_workers[i]):
            table.values[(j, i)] = fakes[idx]
    table.distorted_files = tuple(targets)
    return table
