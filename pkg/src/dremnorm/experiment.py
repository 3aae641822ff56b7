"""Configuration-driven experiment harness.

Wires plant simulation, state-variable filtering, regressor extension and
mixing, excitation normalization, and the three estimation loops; emits CSV
trajectories and standalone SVG plots. Configurations are YAML files (nested
key-value sections, see the bundled presets for the schema).
"""

from __future__ import annotations

import importlib.resources
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import analysis, estimators
from .errors import ConfigError, NumericalError
from .lti import TransferFunction, simulate
from .mixing import mix_series
from .normalizer import normalize_series
from .signals import SampledSignal, add_noise, make_step_input
from .svf import FilterSpec, filter_series

EXP_DECAY = "exp_decay"
UB_MODES = ("stepwise", "continuous")
DEFAULT_GAMMA_SWEEP = (0.05, 0.1, 0.5, 1.0)


@dataclass
class ExperimentConfig:
    """Full plant-experiment configuration.

    theta_true must equal [num..., den...]: the parameter vector the
    regression construction identifies, highest numerator coefficient first.
    """

    plant: TransferFunction
    filter: FilterSpec
    delays: list[float]
    eta_min: float
    input_amplitudes: list[float]
    gains: dict[str, float]
    dt: float
    horizon: float
    theta_true: list[float]
    noise_amplitude: float = 0.0
    seed: int = 0
    delta_for_ub: float = 0.7
    ub_window: float | None = None  # defaults to the horizon
    ub_mode: str = "stepwise"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.horizon < 0.0:
            raise ConfigError(f"horizon must be non-negative, got {self.horizon}")
        if self.ub_mode not in UB_MODES:
            raise ConfigError(f"ub_mode must be one of {UB_MODES}, got {self.ub_mode!r}")
        if self.noise_amplitude < 0.0:
            raise ConfigError("noise_amplitude must be non-negative")
        if not self.input_amplitudes:
            raise ConfigError("input_amplitudes must be non-empty")
        missing = [v for v in estimators.VARIANTS if v not in self.gains]
        if missing:
            raise ConfigError(f"gains missing for variants {missing}")
        for v, g in self.gains.items():
            if v not in estimators.VARIANTS:
                raise ConfigError(f"gain given for unknown variant {v!r}")
            if g <= 0.0:
                raise ConfigError(f"gain for {v} must be positive, got {g}")
        expected = list(self.plant.num) + list(self.plant.den)
        if list(self.theta_true) != expected:
            raise ConfigError(
                f"theta_true {self.theta_true} does not match the plant "
                f"coefficients {expected} (numerator then denominator, "
                "highest degree first)"
            )
        if self.filter.n != self.plant.n:
            raise ConfigError(
                f"filter order {self.filter.n} must equal plant order {self.plant.n}"
            )
        if len(self.delays) != self.plant.m + self.plant.n:
            raise ConfigError(
                f"need m+n = {self.plant.m + self.plant.n} delays, got {len(self.delays)}"
            )

    @property
    def dim(self) -> int:
        return self.plant.m + self.plant.n + 1

    @property
    def ub_window_or_horizon(self) -> float:
        return self.horizon if self.ub_window is None else self.ub_window

    def to_dict(self) -> dict:
        return {
            "plant": {"num": list(self.plant.num), "den": list(self.plant.den)},
            "filter": {"psi": list(self.filter.psi)},
            "delays": list(self.delays),
            "eta_min": self.eta_min,
            "input_amplitudes": list(self.input_amplitudes),
            "gains": dict(self.gains),
            "dt": self.dt,
            "horizon": self.horizon,
            "theta_true": list(self.theta_true),
            "noise_amplitude": self.noise_amplitude,
            "seed": self.seed,
            "delta_for_ub": self.delta_for_ub,
            "ub_window": self.ub_window,
            "ub_mode": self.ub_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            plant = TransferFunction(
                num=tuple(data["plant"]["num"]), den=tuple(data["plant"]["den"])
            )
            spec = FilterSpec(psi=tuple(data["filter"]["psi"]))
            return cls(
                plant=plant,
                filter=spec,
                delays=[float(d) for d in data["delays"]],
                eta_min=float(data["eta_min"]),
                input_amplitudes=[float(a) for a in data["input_amplitudes"]],
                gains={k: float(v) for k, v in data["gains"].items()},
                dt=float(data["dt"]),
                horizon=float(data["horizon"]),
                theta_true=[float(v) for v in data["theta_true"]],
                noise_amplitude=float(data.get("noise_amplitude", 0.0)),
                seed=int(data.get("seed", 0)),
                delta_for_ub=float(data.get("delta_for_ub", 0.7)),
                ub_window=(
                    None if data.get("ub_window") is None else float(data["ub_window"])
                ),
                ub_mode=str(data.get("ub_mode", "stepwise")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid experiment configuration: {exc}") from exc


@dataclass
class SyntheticConfig:
    """Configuration subset for synthetic scalar-regressor runs.

    amplitude and decay_rate are defaults for the CLI; run_synthetic takes
    the actual values as explicit arguments.
    """

    eta_min: float
    gains: dict[str, float]
    dt: float
    window: float
    theta_true: float = 1.0
    amplitude: float = 1.0
    decay_rate: float = 1.0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.window <= 0.0:
            raise ConfigError(f"window must be positive, got {self.window}")
        for v, g in self.gains.items():
            if v not in estimators.VARIANTS:
                raise ConfigError(f"gain given for unknown variant {v!r}")
            if g <= 0.0:
                raise ConfigError(f"gain for {v} must be positive, got {g}")

    def to_dict(self) -> dict:
        return {
            "kind": EXP_DECAY,
            "eta_min": self.eta_min,
            "gains": dict(self.gains),
            "dt": self.dt,
            "window": self.window,
            "theta_true": self.theta_true,
            "amplitude": self.amplitude,
            "decay_rate": self.decay_rate,
        }


@dataclass
class VariantTrajectory:
    variant: str
    gamma: float
    theta_hat: np.ndarray  # (N, d): estimate at each sample time
    theta_final: np.ndarray  # estimate after the last update
    err_norm: np.ndarray  # (N,)
    err_final: float


@dataclass
class AmplitudeRun:
    u_amp: float
    t: np.ndarray
    omega: np.ndarray
    phi: np.ndarray
    valid: np.ndarray
    ub: np.ndarray
    variants: dict[str, VariantTrajectory]
    fill_time: float
    # worst |z_i - omega * theta_i| over valid samples: how far the measurable
    # update is from the pure error dynamics (zero up to rounding when
    # noise-free)
    identity_residual: float = 0.0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[AmplitudeRun]


@dataclass
class SyntheticResult:
    amplitude: float
    decay_rate: float
    config: SyntheticConfig
    t: np.ndarray
    omega: np.ndarray
    phi: np.ndarray
    report: analysis.ExcitationReport
    trajectories: dict[str, VariantTrajectory]


@contextmanager
def _stage(name: str):
    """Re-raise stage failures with the offending stage named."""
    try:
        yield
    except (ConfigError, NumericalError, ValueError) as exc:
        raise type(exc)(f"[stage {name}] {exc}") from exc


def _variant_trajectories(
    cfg_gains: dict[str, float],
    dt: float,
    omega: np.ndarray,
    z: np.ndarray,
    phi: np.ndarray,
    Y: np.ndarray,
    valid: np.ndarray,
    theta_true: np.ndarray,
    gamma_override: dict[str, float] | None = None,
    only: tuple[str, ...] = estimators.VARIANTS,
) -> dict[str, VariantTrajectory]:
    out = {}
    n = omega.shape[0]
    for variant in only:
        gamma = (gamma_override or {}).get(variant, cfg_gains[variant])
        with _stage(f"estimate:{variant}"):
            traj = estimators.estimate_series(
                variant,
                gamma,
                dt,
                omega=omega,
                z=z,
                phi=phi,
                Y=Y,
                valid=valid,
            )
        err = np.linalg.norm(traj - theta_true[None, :], axis=1)
        out[variant] = VariantTrajectory(
            variant=variant,
            gamma=gamma,
            theta_hat=traj[:n],
            theta_final=traj[-1],
            err_norm=err[:n],
            err_final=float(err[-1]),
        )
    return out


def _empty_run(cfg: ExperimentConfig, amp: float, theta_true: np.ndarray) -> AmplitudeRun:
    empty = np.zeros(0)
    variants = {
        v: VariantTrajectory(
            variant=v,
            gamma=cfg.gains[v],
            theta_hat=np.zeros((0, cfg.dim)),
            theta_final=np.zeros(cfg.dim),
            err_norm=empty,
            err_final=float(np.linalg.norm(theta_true)),
        )
        for v in estimators.VARIANTS
    }
    return AmplitudeRun(
        u_amp=amp,
        t=empty,
        omega=empty,
        phi=empty,
        valid=np.zeros(0, dtype=bool),
        ub=empty,
        variants=variants,
        fill_time=0.0,
    )


def _amplitude_pipeline(cfg: ExperimentConfig, amp: float, idx: int) -> dict:
    """Signal pipeline for one input amplitude (everything but estimation)."""
    with _stage("input"):
        u = make_step_input(amp, cfg.dt, cfg.horizon)
    with _stage("simulate"):
        y = simulate(cfg.plant, u)
    if cfg.noise_amplitude > 0.0:
        with _stage("noise"):
            y = add_noise(y, cfg.noise_amplitude, cfg.seed + idx)
    with _stage("svf"):
        t, z_bar, omega_bar = filter_series(cfg.filter, cfg.plant.m, u, y)
    with _stage("mixing"):
        omega, z, valid = mix_series(z_bar, omega_bar, cfg.delays, cfg.dt)
    with _stage("normalize"):
        phi, Y = normalize_series(omega, z, cfg.eta_min)
    return dict(t=t, omega=omega, z=z, valid=valid, phi=phi, Y=Y)


def _finish_run(
    cfg: ExperimentConfig,
    amp: float,
    pipe: dict,
    theta_true: np.ndarray,
    gamma_override: dict[str, float] | None = None,
    only: tuple[str, ...] = estimators.VARIANTS,
) -> AmplitudeRun:
    variants = _variant_trajectories(
        cfg.gains, cfg.dt, pipe["omega"], pipe["z"], pipe["phi"], pipe["Y"],
        pipe["valid"], theta_true, gamma_override=gamma_override, only=only,
    )
    resid = np.abs(pipe["z"] - pipe["omega"][:, None] * theta_true[None, :]).max(axis=1)
    valid = pipe["valid"]
    identity_residual = float(resid[valid].max()) if valid.any() else 0.0
    gamma_ne = (gamma_override or {}).get(
        estimators.NORM_EXCITATION, cfg.gains[estimators.NORM_EXCITATION]
    )
    with _stage("bounds"):
        ub = analysis.ub_values(
            pipe["t"],
            gamma=gamma_ne,
            delta=cfg.delta_for_ub,
            T=cfg.ub_window_or_horizon,
            t_s=0.0,
            theta_err_start=float(np.linalg.norm(theta_true)),
            mode=cfg.ub_mode,
        )
    return AmplitudeRun(
        u_amp=amp,
        t=pipe["t"],
        omega=pipe["omega"],
        phi=pipe["phi"],
        valid=valid,
        ub=ub,
        variants=variants,
        fill_time=max(cfg.delays),
        identity_residual=identity_residual,
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the full pipeline for every input amplitude.

    Deterministic given the seed: per-amplitude noise streams draw from
    seed + amplitude index. A zero horizon yields empty trajectories.
    """
    theta_true = np.asarray(cfg.theta_true, dtype=np.float64)
    n_samples = int(round(cfg.horizon / cfg.dt))
    runs: list[AmplitudeRun] = []
    for idx, amp in enumerate(cfg.input_amplitudes):
        if n_samples == 0:
            runs.append(_empty_run(cfg, amp, theta_true))
            continue
        pipe = _amplitude_pipeline(cfg, amp, idx)
        runs.append(_finish_run(cfg, amp, pipe, theta_true))
    return ExperimentResult(config=cfg, runs=runs)


def run_synthetic(
    kind: str, amplitude: float, decay_rate: float, cfg: SyntheticConfig
) -> SyntheticResult:
    """Feed a synthetic scalar regressor directly to normalizer and loops.

    The regressor amplitude * exp(-decay_rate * t) is sampled on the
    inclusive grid [0, window]; the loops consume the samples before the
    window end, so trajectory row k is the estimate at t_k and the last row
    the estimate at the window end. The scalar regression target is
    omega * theta_true (noise-free).
    """
    if kind != EXP_DECAY:
        raise ConfigError(f"unknown synthetic regressor kind {kind!r}")
    if decay_rate <= 0.0:
        raise ConfigError(f"decay rate must be positive, got {decay_rate}")
    n = int(round(cfg.window / cfg.dt))
    t = cfg.dt * np.arange(n + 1)
    omega = amplitude * np.exp(-decay_rate * t)
    z = omega * cfg.theta_true
    phi, Y = normalize_series(omega, z, cfg.eta_min)
    signal = SampledSignal(dt=cfg.dt, samples=omega)
    report = analysis.analyze_excitation(signal, 0.0, cfg.window, cfg.eta_min)
    theta_true = np.asarray([cfg.theta_true])
    trajectories = {}
    for variant, gamma in cfg.gains.items():
        traj = estimators.estimate_series(
            variant,
            gamma,
            cfg.dt,
            omega=omega[:n],
            z=z[:n],
            phi=phi[:n],
            Y=Y[:n],
        )
        err = np.abs(traj[:, 0] - cfg.theta_true)
        trajectories[variant] = VariantTrajectory(
            variant=variant,
            gamma=gamma,
            theta_hat=traj,
            theta_final=traj[-1],
            err_norm=err,
            err_final=float(err[-1]),
        )
    return SyntheticResult(
        amplitude=amplitude,
        decay_rate=decay_rate,
        config=cfg,
        t=t,
        omega=omega,
        phi=phi,
        report=report,
        trajectories=trajectories,
    )


def run_gamma_sweep(
    cfg: ExperimentConfig, gamma_values: list[float]
) -> list[tuple[float, ExperimentResult]]:
    """Re-run the excitation-normalized loop for each gamma value.

    The signal pipeline does not depend on the gain, so it is computed once
    per amplitude and only the estimation loop is repeated.
    """
    for g in gamma_values:
        if g <= 0.0:
            raise ConfigError(f"sweep gamma must be positive, got {g}")
    theta_true = np.asarray(cfg.theta_true, dtype=np.float64)
    n_samples = int(round(cfg.horizon / cfg.dt))
    pipes = None
    if n_samples > 0:
        pipes = [
            _amplitude_pipeline(cfg, amp, idx)
            for idx, amp in enumerate(cfg.input_amplitudes)
        ]
    results = []
    for g in gamma_values:
        override = {estimators.NORM_EXCITATION: g}
        if n_samples == 0:
            runs = [_empty_run(cfg, amp, theta_true) for amp in cfg.input_amplitudes]
        else:
            runs = [
                _finish_run(
                    cfg, amp, pipe, theta_true, gamma_override=override,
                    only=(estimators.NORM_EXCITATION,),
                )
                for amp, pipe in zip(cfg.input_amplitudes, pipes)
            ]
        results.append((g, ExperimentResult(config=cfg, runs=runs)))
    return results


# ---------------------------------------------------------------------------
# configuration files and presets

def config_to_yaml(cfg: ExperimentConfig | SyntheticConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


def save_config(cfg: ExperimentConfig | SyntheticConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_yaml(cfg))


def parse_config(data: dict) -> ExperimentConfig | SyntheticConfig:
    """Build a configuration from parsed YAML; plant configs carry a
    'plant' section, synthetic ones a 'kind' entry."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    if "plant" in data:
        return ExperimentConfig.from_dict(data)
    if data.get("kind") == EXP_DECAY:
        try:
            return SyntheticConfig(
                eta_min=float(data["eta_min"]),
                gains={k: float(v) for k, v in data["gains"].items()},
                dt=float(data["dt"]),
                window=float(data["window"]),
                theta_true=float(data.get("theta_true", 1.0)),
                amplitude=float(data.get("amplitude", 1.0)),
                decay_rate=float(data.get("decay_rate", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid synthetic configuration: {exc}") from exc
    raise ConfigError(
        "configuration must contain a 'plant' section or 'kind: exp_decay'"
    )


def load_config(path: str | Path) -> ExperimentConfig | SyntheticConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration {path}: {exc}") from exc
    return parse_config(data)


def preset_names() -> list[str]:
    root = importlib.resources.files("dremnorm").joinpath("presets")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_preset(name: str) -> ExperimentConfig | SyntheticConfig:
    root = importlib.resources.files("dremnorm").joinpath("presets")
    res = root.joinpath(f"{name}.yaml")
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    return parse_config(yaml.safe_load(res.read_text()))


# ---------------------------------------------------------------------------
# emission

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def csv_header(dim: int) -> str:
    theta_cols = ",".join(f"theta_hat_{i}" for i in range(dim))
    return f"t,u_amp,variant,omega,phi,{theta_cols},err_norm,ub"


def emit_csv(result: ExperimentResult, path: str | Path) -> Path:
    """Write one row per sample per variant; floats with 12 significant digits."""
    if not result.runs:
        raise ValueError("result has no runs to emit")
    path = Path(path)
    dim = result.config.dim
    lines = [csv_header(dim)]
    for run in result.runs:
        for variant in estimators.VARIANTS:
            if variant not in run.variants:
                continue
            vt = run.variants[variant]
            for k in range(len(run.t)):
                theta_cols = ",".join(_fmt(v) for v in vt.theta_hat[k])
                lines.append(
                    f"{_fmt(run.t[k])},{_fmt(run.u_amp)},{variant},"
                    f"{_fmt(run.omega[k])},{_fmt(run.phi[k])},{theta_cols},"
                    f"{_fmt(vt.err_norm[k])},{_fmt(run.ub[k])}"
                )
    path.write_text("\n".join(lines) + "\n")
    return path


def emit_synthetic_csv(results: list[SyntheticResult], path: str | Path) -> Path:
    """Synthetic runs in the same CSV layout (u_amp column = regressor amplitude)."""
    if not results:
        raise ValueError("no synthetic results to emit")
    path = Path(path)
    lines = [csv_header(1)]
    for res in results:
        ub = np.ones_like(res.t)  # no bound curve configured for synthetic runs
        for variant, vt in res.trajectories.items():
            for k in range(len(res.t)):
                lines.append(
                    f"{_fmt(res.t[k])},{_fmt(res.amplitude)},{variant},"
                    f"{_fmt(res.omega[k])},{_fmt(res.phi[k])},"
                    f"{_fmt(vt.theta_hat[k, 0])},{_fmt(vt.err_norm[k])},{_fmt(ub[k])}"
                )
    path.write_text("\n".join(lines) + "\n")
    return path


def _save_svg(fig, path: Path) -> None:
    import matplotlib

    # fixed hash salt and no creation date: identical runs, identical bytes
    with matplotlib.rc_context({"svg.hashsalt": "dremnorm"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_plot(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Standalone SVG plots: phi(t) per amplitude, and error norms with the
    configured upper-bound curve."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    if not result.runs:
        raise ValueError("result has no runs to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(7, 4))
    for run in result.runs:
        ax.plot(run.t, run.phi, label=f"u = {run.u_amp:g}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("phi")
    ax.set_title("Normalized regressor")
    ax.legend()
    p = out_dir / "phi.svg"
    _save_svg(fig, p)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(7, 4))
    for run in result.runs:
        for variant, vt in run.variants.items():
            if len(run.t) == 0:
                continue
            ax.semilogy(run.t, np.maximum(vt.err_norm, 1e-300),
                        label=f"{variant}, u = {run.u_amp:g}")
    if result.runs and len(result.runs[0].t):
        ax.semilogy(result.runs[0].t, result.runs[0].ub, "k--", label="upper bound")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("|theta error|")
    ax.set_title("Parameter error norm")
    ax.legend(fontsize=7)
    p = out_dir / "error_norm.svg"
    _save_svg(fig, p)
    plt.close(fig)
    paths.append(p)
    return paths


def emit_sweep_plot(
    sweep: list[tuple[float, ExperimentResult]], out_dir: str | Path
) -> Path:
    """Error norm of the excitation-normalized loop per gain value."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    for gamma, result in sweep:
        for run in result.runs:
            vt = run.variants[estimators.NORM_EXCITATION]
            if len(run.t) == 0:
                continue
            ax.semilogy(run.t, np.maximum(vt.err_norm, 1e-300),
                        label=f"gamma = {gamma:g}, u = {run.u_amp:g}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("|theta error|")
    ax.set_title("Gain sweep, excitation-normalized loop")
    ax.legend(fontsize=7)
    p = out_dir / "gamma_sweep.svg"
    _save_svg(fig, p)
    plt.close(fig)
    return p


def emit_sweep_csv(
    sweep: list[tuple[float, ExperimentResult]], path: str | Path
) -> Path:
    """Sweep rows in the run CSV layout; the variant column carries the gain."""
    if not sweep:
        raise ValueError("no sweep results to emit")
    path = Path(path)
    dim = sweep[0][1].config.dim
    lines = [csv_header(dim)]
    for gamma, result in sweep:
        label = f"{estimators.NORM_EXCITATION}@{_fmt(gamma)}"
        for run in result.runs:
            vt = run.variants[estimators.NORM_EXCITATION]
            for k in range(len(run.t)):
                theta_cols = ",".join(_fmt(v) for v in vt.theta_hat[k])
                lines.append(
                    f"{_fmt(run.t[k])},{_fmt(run.u_amp)},{label},"
                    f"{_fmt(run.omega[k])},{_fmt(run.phi[k])},{theta_cols},"
                    f"{_fmt(vt.err_norm[k])},{_fmt(run.ub[k])}"
                )
    path.write_text("\n".join(lines) + "\n")
    return path
