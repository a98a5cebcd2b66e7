"""Discrete-time scenario engine: pool weight -> controller -> CDP accrual.

Each step ``k`` happens at ``t = k * dt``. The controller is updated with the
scheduled weight and the current TCR/MCR, then the system accrues interest at
the resulting rate for ``dt``. A run stops at ``duration`` or as soon as the
system is fully levered (TCR/MCR <= 1).
"""
from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence, Union

from pidrate import kernel
from pidrate.controller import ControllerConfig
from pidrate.errors import BracketingError, ConfigError
from pidrate.fixed import ONE, ZERO, Fixed, div, fx

DEFAULT_DT = div(fx("0.5"), fx("365.25"))  # 12 hours in years
DEFAULT_HORIZON = fx(10)
DEFAULT_TOL = fx("0.005")
PHI_CAP = fx(10_000)
MIN_SWEEP_RATIO = fx("1.1")

CSV_HEADER = "step,t_years,weight,e_norm,e_p,e_i,e_d,e_ctrl,rate,tcr_mcr,debt"


def _check_weight(w: Fixed, what: str) -> None:
    if not (ZERO < w < ONE):
        raise ConfigError(f"{what} must lie in (0, 1), got {w}")


@dataclass(frozen=True)
class Constant:
    w: Fixed

    def validate(self) -> None:
        _check_weight(self.w, "constant weight")

    def weight_at(self, step: int, t: Fixed) -> Fixed:
        return self.w


@dataclass(frozen=True)
class RampHold:
    """Move from ``w_start`` toward ``w_end`` by ``step_increment`` every
    ``steps_per_increment`` steps, then hold at ``w_end``."""

    w_start: Fixed
    w_end: Fixed
    step_increment: Fixed
    steps_per_increment: int = 1

    def validate(self) -> None:
        _check_weight(self.w_start, "ramp start weight")
        _check_weight(self.w_end, "ramp end weight")
        if self.step_increment <= ZERO:
            raise ConfigError("ramp step_increment must be positive")
        if self.steps_per_increment < 1:
            raise ConfigError("ramp steps_per_increment must be >= 1")

    def weight_at(self, step: int, t: Fixed) -> Fixed:
        moved = self.step_increment * (step // self.steps_per_increment)
        if self.w_end >= self.w_start:
            w = self.w_start + moved
            return self.w_end if w > self.w_end else w
        w = self.w_start - moved
        return self.w_end if w < self.w_end else w

    @property
    def hold_start_step(self) -> int:
        gap = abs(self.w_end.raw - self.w_start.raw)
        n_increments = -(-gap // self.step_increment.raw)
        return n_increments * self.steps_per_increment


@dataclass(frozen=True)
class Points:
    """Piecewise-constant schedule: each weight holds from its time until the next point."""

    points: tuple[tuple[Fixed, Fixed], ...]

    def validate(self) -> None:
        if not self.points:
            raise ConfigError("points schedule needs at least one (t, w) pair")
        if self.points[0][0] != ZERO:
            raise ConfigError("points schedule must start at t = 0")
        for (t0, _), (t1, _) in zip(self.points, self.points[1:]):
            if t1 <= t0:
                raise ConfigError("points schedule times must be strictly increasing")
        for _, w in self.points:
            _check_weight(w, "scheduled weight")

    def weight_at(self, step: int, t: Fixed) -> Fixed:
        current = self.points[0][1]
        for t_i, w_i in self.points:
            if t_i > t:
                break
            current = w_i
        return current


WeightSchedule = Union[Constant, RampHold, Points]


@dataclass(frozen=True)
class Scenario:
    controller_cfg: ControllerConfig
    initial_ratio: Fixed
    initial_debt: Fixed
    weight_schedule: WeightSchedule
    duration: Fixed
    dt: Fixed = DEFAULT_DT

    def validate(self) -> None:
        if self.dt <= ZERO:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.duration < self.dt:
            raise ConfigError("duration must be at least one timestep")
        if self.initial_debt <= ZERO:
            raise ConfigError("initial_debt must be positive")
        if self.initial_ratio < ZERO:
            raise ConfigError("initial_ratio must be non-negative")
        self.weight_schedule.validate()

    @property
    def n_steps(self) -> int:
        return -(-self.duration.raw // self.dt.raw)

    def weights_raw(self) -> list[int]:
        sched = self.weight_schedule
        if isinstance(sched, Constant):
            return [sched.w.raw] * self.n_steps
        return [sched.weight_at(k, Fixed(k * self.dt.raw)).raw for k in range(self.n_steps)]


@dataclass(frozen=True)
class SimRow:
    step: int
    t_years: Fixed
    weight: Fixed
    e_norm: Fixed
    e_p: Fixed
    e_i: Fixed
    e_d: Fixed
    e_ctrl: Fixed
    rate: Fixed
    tcr_mcr: Fixed
    debt: Fixed


@dataclass
class SimResult:
    """Per-step series of one run, stored column-wise as raw integers.

    ``t_terminal`` is the time within the final step at which TCR/MCR
    crossed 1 under the step's simple accrual, or ``None`` if the run hit
    its duration first.
    """

    columns: dict[str, list[int]]
    terminated_early: bool
    t_terminal: Optional[Fixed] = None
    backend: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.columns["t"])

    def column(self, name: str) -> list[Fixed]:
        if name == "e_p":
            name = "e_norm"
        return [Fixed(v) for v in self.columns[name]]

    @property
    def rows(self) -> list[SimRow]:
        return list(self.iter_rows())

    def iter_rows(self) -> Iterator[SimRow]:
        c = self.columns
        for k in range(len(self)):
            e_norm = Fixed(c["e_norm"][k])
            yield SimRow(
                step=k,
                t_years=Fixed(c["t"][k]),
                weight=Fixed(c["w"][k]),
                e_norm=e_norm,
                e_p=e_norm,
                e_i=Fixed(c["e_i"][k]),
                e_d=Fixed(c["e_d"][k]),
                e_ctrl=Fixed(c["e_ctrl"][k]),
                rate=Fixed(c["rate"][k]),
                tcr_mcr=Fixed(c["tcr_mcr"][k]),
                debt=Fixed(c["debt"][k]),
            )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        c = self.columns
        order = ("t", "w", "e_norm", "e_norm", "e_i", "e_d", "e_ctrl", "rate", "tcr_mcr", "debt")
        for k in range(len(self)):
            cells = [str(k)] + [Fixed(c[name][k]).to_decimal_string(pad=True) for name in order]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def summary(self) -> str:
        term = "none" if self.t_terminal is None else self.t_terminal.to_decimal_string()
        final = Fixed(self.columns["tcr_mcr"][-1]) if len(self) else None
        return (
            f"steps={len(self)} terminated_early={str(self.terminated_early).lower()} "
            f"t_terminal={term} final_tcr_mcr={final}"
        )


def run(scenario: Scenario, backend: str | None = None) -> SimResult:
    scenario.validate()
    cols, terminated, t_terminal = kernel.run_steps(
        scenario.weights_raw(),
        scenario.dt.raw,
        scenario.initial_ratio.raw,
        scenario.initial_debt.raw,
        kernel.config_raw(scenario.controller_cfg),
        record=True,
        backend=backend,
    )
    return SimResult(
        columns=cols,
        terminated_early=terminated,
        t_terminal=None if t_terminal is None else Fixed(t_terminal),
        backend=backend or kernel.BACKEND,
    )


def time_to_full_leverage(
    phi: Fixed,
    initial_ratio: Fixed,
    held_weight: Fixed,
    cfg: ControllerConfig,
    dt: Fixed = DEFAULT_DT,
    horizon: Fixed = DEFAULT_HORIZON,
    backend: str | None = None,
) -> Optional[Fixed]:
    """Time until TCR/MCR reaches 1 with weight held constant under phi.

    ``None`` if the system is not fully levered within ``horizon`` years.
    """
    _check_weight(held_weight, "held weight")
    run_cfg = replace(cfg, phi=phi, k_i_fixed=None)
    n_steps = -(-horizon.raw // dt.raw)
    _, terminated, t_terminal = kernel.run_steps(
        [held_weight.raw] * n_steps,
        dt.raw,
        initial_ratio.raw,
        ONE.raw,
        kernel.config_raw(run_cfg),
        record=False,
        backend=backend,
    )
    return Fixed(t_terminal) if terminated else None


def _missed(ts: Optional[Fixed], target: Fixed) -> bool:
    # too slow (or never) -> phi must grow
    return ts is None or ts > target


def find_phi(
    ratio: Fixed,
    target: Fixed,
    held_weight: Fixed,
    cfg: ControllerConfig,
    dt: Fixed = DEFAULT_DT,
    tol: Fixed = DEFAULT_TOL,
    horizon: Fixed = DEFAULT_HORIZON,
    backend: str | None = None,
) -> Fixed:
    """Bisect phi so the recovery time lands within ``tol`` of ``target``.

    Relies on the recovery time being non-increasing in phi. The upper
    bracket doubles from 1 up to a cap of 10,000.
    """

    def t_star(phi: Fixed) -> Optional[Fixed]:
        return time_to_full_leverage(phi, ratio, held_weight, cfg, dt, horizon, backend)

    lo = ZERO
    ts = t_star(lo)
    if ts is not None and abs(ts - target) <= tol:
        return lo
    if not _missed(ts, target):
        raise BracketingError(
            f"ratio {ratio}: recovery at phi=0 already beats the target ({ts} < {target})", ratio
        )
    hi = ONE
    while _missed(t_star(hi), target):
        if hi >= PHI_CAP:
            raise BracketingError(f"ratio {ratio}: target {target} not reached even at phi={PHI_CAP}", ratio)
        hi = hi * 2
        if hi > PHI_CAP:
            hi = PHI_CAP
    for _ in range(256):
        mid = Fixed((lo.raw + hi.raw) // 2)
        ts = t_star(mid)
        if ts is not None and abs(ts - target) <= tol:
            return mid
        if _missed(ts, target):
            lo = mid
        else:
            hi = mid
        if hi.raw - lo.raw <= 1:
            break
    raise BracketingError(f"ratio {ratio}: bisection could not land within tol {tol} of {target}", ratio)


def _find_phi_args(args):
    return find_phi(*args)


def sweep_phi(
    ratios: Sequence[Fixed],
    target: Fixed,
    held_weight: Fixed,
    cfg: ControllerConfig,
    dt: Fixed = DEFAULT_DT,
    tol: Fixed = DEFAULT_TOL,
    workers: int = 1,
    horizon: Fixed = DEFAULT_HORIZON,
    backend: str | None = None,
) -> list[tuple[Fixed, Fixed]]:
    """phi* for each starting ratio, in input order.

    ``workers > 1`` evaluates ratios in separate processes; the result is
    identical to the serial sweep.
    """
    for r in ratios:
        if r <= MIN_SWEEP_RATIO:
            raise ConfigError(f"ratios must exceed {MIN_SWEEP_RATIO} (base rate alone meets the target there); got {r}")
    if target <= ZERO:
        raise ConfigError("target must be positive")
    _check_weight(held_weight, "held weight")
    jobs = [(r, target, held_weight, cfg, dt, tol, horizon, backend) for r in ratios]
    if workers <= 1 or len(jobs) <= 1:
        phis = [_find_phi_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            phis = list(pool.map(_find_phi_args, jobs))
    return list(zip(ratios, phis))


def parse_range(spec: str) -> list[Fixed]:
    """``start:stop:step`` in decimal text, stop inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must look like start:stop:step, got {spec!r}")
    try:
        start, stop, step = (fx(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad number in range {spec!r}: {exc}") from None
    if step <= ZERO:
        raise ConfigError("range step must be positive")
    if stop < start:
        raise ConfigError("range stop must not precede start")
    n = (stop.raw - start.raw) // step.raw
    return [start + step * k for k in range(n + 1)]

