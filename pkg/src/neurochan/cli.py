"""Batch experiment driver: read a JSON config, run one experiment, write artifacts.

Usage:
    neurochan run <config.json | bundled-name> [--out DIR] [--seed N] [--expect-pass]
    neurochan list-examples

Exit status: 0 on success, 1 on configuration/validation errors, 2 on numerical
failure (solver infeasible, simulation divergence, or a failed check under
--expect-pass).  The environment variable NEUROCHAN_THREADS caps internal
parallelism; identical config + seed always produce byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import artifacts, design as design_mod, frames as frames_mod
from . import intermittency as inter_mod, lattice as lattice_mod
from . import numerics, quantize as quant_mod, uncertainty as unc_mod
from ._parallel import parallel_map
from .channels import ChannelSet
from .errors import (
    ConfigError,
    DivergenceError,
    InfeasibleError,
    NeurochanError,
)
from .lifting import lift_invariant
from .plant import Plant

KINDS = ("classify", "design", "certify", "intermittency", "uncertainty", "frames", "emulate")

# Kinds that draw random numbers and therefore must carry a seed.
SEEDED_KINDS = ("intermittency", "uncertainty")


@dataclass
class RunResult:
    passed: bool
    notes: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)


def _require(cfg: dict, key: str, where: str = "config"):
    if key not in cfg:
        raise ConfigError(f"missing config field '{where}.{key}'" if where else f"missing config field '{key}'")
    return cfg[key]


def _matrix(cfg: dict, key: str, where: str) -> np.ndarray:
    raw = _require(cfg, key, where)
    try:
        return numerics.as_matrix(raw, f"{where}.{key}")
    except NeurochanError as exc:
        raise ConfigError(f"config field '{where}.{key}': {exc}") from exc


def _load_plant(cfg: dict, base_dir: Path) -> Plant:
    spec = _require(cfg, "plant")
    if isinstance(spec, str):
        path = Path(spec)
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"config field 'plant': file {path} not found")
        spec = json.loads(path.read_text())
    if not isinstance(spec, dict):
        raise ConfigError("config field 'plant' must be an object or a file path")
    try:
        return Plant(A=_matrix(spec, "A", "plant"), B=_matrix(spec, "B", "plant"))
    except NeurochanError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config field 'plant': {exc}") from exc


def _load_gain(cfg: dict, plant: Plant) -> design_mod.GainDesign:
    gain = _require(cfg, "gain")
    if not isinstance(gain, dict):
        raise ConfigError("config field 'gain' must be an object")
    alpha = _require(gain, "alpha", "gain")
    scaling = gain.get("scaling", "fixed")
    x_g = gain.get("x_g")
    if "Ahat" in gain:
        Ahat = _matrix(gain, "Ahat", "gain")
    elif "invariance" in gain:
        try:
            channels = ChannelSet(plant.m, tuple(gain["invariance"]))
            Ahat = lift_invariant(plant, channels)
        except NeurochanError as exc:
            raise ConfigError(f"config field 'gain.invariance': {exc}") from exc
    else:
        raise ConfigError("config field 'gain' needs either 'Ahat' or 'invariance'")
    try:
        return design_mod.make_gain(plant, Ahat, alpha, x_g=x_g, scaling=scaling)
    except NeurochanError as exc:
        raise ConfigError(f"config field 'gain': {exc}") from exc


def _channel_set(raw, m: int, where: str) -> ChannelSet:
    try:
        return ChannelSet(m, tuple(raw))
    except NeurochanError as exc:
        raise ConfigError(f"config field '{where}': {exc}") from exc


# --- experiment runners -----------------------------------------------------


def _run_classify(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    T = float(cfg.get("T", 1.0))
    report = lattice_mod.classify_controllability(plant, T)
    header, rows = report.to_csv_rows()
    path = out / "classification.csv"
    artifacts.write_csv(str(path), header, rows)
    counts = report.counts_by_cardinality()
    notes = [f"k={k}: {p}/{t} controllable" for k, (p, t) in counts.items()]
    return RunResult(passed=True, notes=notes, artifacts=[str(path)])


def _run_design(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    if "pole_targets" in cfg:
        targets = {}
        for key, pair in cfg["pole_targets"].items():
            idx = tuple(int(tok) for tok in str(key).split(","))
            targets[_channel_set(idx, plant.m, "pole_targets")] = tuple(pair)
        K = design_mod.problem_b_solve(plant, targets, seed=seed if seed is not None else 0)
        gain_path = out / "gain.json"
        artifacts.write_json(str(gain_path), {"K": K.tolist()})
        rows = []
        for subset in sorted(targets, key=lambda c: c.indices):
            M = plant.A + (plant.B * subset.mask()) @ K
            for lam in numerics.eigenvalues(M).eigenvalues:
                rows.append([subset.label(), lam.real, lam.imag])
        full = numerics.eigenvalues(plant.A + plant.B @ K)
        for lam in full.eigenvalues:
            rows.append([ChannelSet.full(plant.m).label(), lam.real, lam.imag])
        spec_path = out / "projected_spectra.csv"
        artifacts.write_csv(str(spec_path), ["indices", "eig_real", "eig_imag"], rows)
        return RunResult(
            passed=True,
            notes=[f"gain found; full-loop margin {full.max_real_part:.4f}"],
            artifacts=[str(gain_path), str(spec_path)],
        )
    gain = _load_gain(cfg, plant)
    design_path = out / "design.json"
    artifacts.write_json(str(design_path), gain.to_json_dict())
    spectrum = numerics.eigenvalues(plant.A + plant.B @ gain.K)
    rows = [[lam.real, lam.imag] for lam in spectrum.eigenvalues]
    spec_path = out / "closed_loop_spectrum.csv"
    artifacts.write_csv(str(spec_path), ["eig_real", "eig_imag"], rows)
    passed = spectrum.max_real_part < numerics.HURWITZ_TOL
    return RunResult(
        passed=passed,
        notes=[f"closed-loop margin {spectrum.max_real_part:.6f}"],
        artifacts=[str(design_path), str(spec_path)],
    )


def _run_certify(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    gain = _load_gain(cfg, plant)
    root = _channel_set(_require(cfg, "invariance"), plant.m, "invariance")
    cert = design_mod.certify_resilience(plant, gain, root)
    header, rows = cert.to_csv_rows()
    cert_path = out / "certificate.csv"
    artifacts.write_csv(str(cert_path), header, rows)
    summary_path = out / "certificate.json"
    artifacts.write_json(
        str(summary_path),
        {
            "root": cert.root_set.label(),
            "all_pass": cert.all_pass,
            "diagnostics": list(cert.diagnostics),
        },
    )
    notes = list(cert.diagnostics) or [f"all_pass={cert.all_pass}"]
    return RunResult(
        passed=cert.all_pass is True,
        notes=notes,
        artifacts=[str(cert_path), str(summary_path)],
    )


def _run_intermittency(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    gain = _load_gain(cfg, plant)
    model = inter_mod.MarkovChannelModel(
        delta=_require(cfg, "delta"), epsilon=_require(cfg, "epsilon")
    )
    horizon = float(_require(cfg, "horizon"))
    dt = float(cfg.get("dt", inter_mod.DEFAULT_DT))
    x0 = numerics.as_vector(_require(cfg, "x0"), plant.n, "x0")
    runs = int(cfg.get("runs", 100))
    threshold = float(cfg.get("contraction_threshold", 0.01))
    min_fraction = float(cfg.get("min_success_fraction", 0.9))
    base_seed = int(seed)

    first = inter_mod.simulate_switched(
        plant, gain, inter_mod.sample_availability(model, plant.m, horizon, base_seed), x0, dt
    )
    traj_path = out / "trajectory.csv"
    header, rows = first.to_csv_rows()
    artifacts.write_csv(str(traj_path), header, rows)
    svg_path = out / "trajectory.svg"
    artifacts.write_svg_polylines(
        str(svg_path), [(first.times, first.norms())], title="state norm vs time"
    )

    x0_norm = float(np.linalg.norm(x0))

    def one(run_seed: int):
        path = inter_mod.sample_availability(model, plant.m, horizon, run_seed)
        traj = inter_mod.simulate_switched(plant, gain, path, x0, dt)
        final = float(np.linalg.norm(traj.final_state))
        return run_seed, final, final / x0_norm

    summary = parallel_map(one, range(base_seed, base_seed + runs))
    summary_path = out / "batch_summary.csv"
    artifacts.write_csv(
        str(summary_path), ["seed", "final_norm", "contraction_ratio"], summary
    )
    hits = sum(1 for _, _, ratio in summary if ratio < threshold)
    fraction = hits / runs
    return RunResult(
        passed=fraction >= min_fraction,
        notes=[f"{hits}/{runs} runs contracted below {threshold}"],
        artifacts=[str(traj_path), str(summary_path), str(svg_path)],
    )


def _run_uncertainty(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    gain = _load_gain(cfg, plant)
    noise = None
    if "sigma" in cfg:
        noise = unc_mod.NoiseModel(_matrix(cfg, "sigma", ""))
    trials = int(cfg.get("trials", 100_000))
    _, closed_form = unc_mod.steady_state_error(plant, gain, noise)
    samples = unc_mod.sample_squared_errors(plant, gain, noise, trials, int(seed))
    empirical = float(samples.mean())
    stderr = float(samples.std(ddof=1) / np.sqrt(trials))
    rows = [[cfg_id, closed_form, empirical, stderr]]
    notes = [f"closed form {closed_form:.6f}, empirical {empirical:.6f} (stderr {stderr:.2e})"]
    if "augment_b" in cfg:
        new_mse, old_mse = unc_mod.augment_channel(
            plant, gain, numerics.as_vector(cfg["augment_b"], plant.n, "augment_b")
        )
        rows.append([cfg_id + "+channel", new_mse, "", ""])
        notes.append(f"augmented channel drops mse {old_mse:.6f} -> {new_mse:.6f}")
    path = out / "uncertainty.csv"
    artifacts.write_csv(
        str(path), ["config_id", "closed_form_mse", "empirical_mse", "stderr"], rows
    )
    passed = abs(empirical - closed_form) <= 3.0 * stderr
    return RunResult(passed=passed, notes=notes, artifacts=[str(path)])


def _run_frames(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    raw = _require(cfg, "frame")
    n = int(_require(raw, "n", "frame"))
    try:
        if n == 2:
            spec = frames_mod.FrameSpec(n=2, m=int(_require(raw, "m", "frame")))
            B = frames_mod.circle_frame(spec.m)
            predicted = frames_mod.circle_gram_radius(spec.m)
        else:
            spec = frames_mod.FrameSpec(n=n, counts=tuple(_require(raw, "counts", "frame")))
            B = frames_mod.sphere_frame(spec)
            predicted = frames_mod.sphere_gram_peak(spec)
    except NeurochanError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config field 'frame': {exc}") from exc
    frame_path = out / "frame.csv"
    artifacts.write_csv(
        str(frame_path),
        ["column"] + [f"x{i + 1}" for i in range(n)],
        [[k + 1] + [float(v) for v in B[:, k]] for k in range(B.shape[1])],
    )
    gram = B @ B.T
    eigs = frames_mod.gram_spectrum(B)
    off_diag = float(np.abs(gram - np.diag(np.diag(gram))).max())
    spec_path = out / "spectrum.json"
    artifacts.write_json(
        str(spec_path),
        {
            "gram_diagonal": np.diag(gram).tolist(),
            "eigenvalues": eigs.tolist(),
            "max_eigenvalue": float(eigs[-1]),
            "predicted_max": predicted,
            "max_off_diagonal": off_diag,
        },
    )
    passed = off_diag < 1e-9 and abs(float(eigs[-1]) - predicted) < 1e-9
    return RunResult(
        passed=passed,
        notes=[f"{B.shape[1]} columns; peak {eigs[-1]:.6f} (predicted {predicted})"],
        artifacts=[str(frame_path), str(spec_path)],
    )


def _run_emulate(cfg, out: Path, cfg_id: str, seed) -> RunResult:
    plant = _load_plant(cfg, out)
    target = quant_mod.EmulationTarget(
        H=_matrix(cfg, "H", ""),
        h=float(_require(cfg, "h")),
        alphabet=cfg.get("alphabet", "pm_one"),
        column_weights=cfg.get("weights"),
    )
    x0 = numerics.as_vector(_require(cfg, "x0"), plant.n, "x0")
    steps = int(_require(cfg, "steps"))
    traj = quant_mod.simulate_emulation(target, plant, x0, steps)
    traj_path = out / "trajectory.csv"
    header, rows = traj.to_csv_rows()
    artifacts.write_csv(str(traj_path), header, rows)
    traj_svg = out / "trajectory.svg"
    artifacts.write_svg_polylines(
        str(traj_svg),
        [(traj.states[:, 0], traj.states[:, 1])],
        title="emulated path in the plane",
    )
    written = [str(traj_path), str(traj_svg)]
    notes = []
    if "grid" in cfg:
        grid = cfg["grid"]
        cmap = quant_mod.cell_map(
            target,
            plant,
            bounds=tuple(grid.get("bounds", (-2.0, 2.0))),
            resolution=int(grid.get("resolution", 101)),
        )
        cmap_path = out / "cellmap.csv"
        h2, r2 = cmap.to_csv_rows()
        artifacts.write_csv(str(cmap_path), h2, r2)
        cmap_svg = out / "cellmap.svg"
        artifacts.write_svg_cellmap(str(cmap_svg), cmap, title="selection cells")
        written += [str(cmap_path), str(cmap_svg)]
        notes.append(f"{cmap.distinct_labels().size} distinct selection cells")
    norms = traj.norms()
    tail = norms[max(len(norms) - max(steps // 5, 1), 1) :]
    notes.append(f"terminal radius (tail max) {tail.max():.4f}")
    passed = True
    if "capture_radius" in cfg:
        passed = bool(tail.max() < float(cfg["capture_radius"]))
    return RunResult(passed=passed, notes=notes, artifacts=written)


_RUNNERS = {
    "classify": _run_classify,
    "design": _run_design,
    "certify": _run_certify,
    "intermittency": _run_intermittency,
    "uncertainty": _run_uncertainty,
    "frames": _run_frames,
    "emulate": _run_emulate,
}


# --- config resolution and entry point ---------------------------------------


def bundled_config_names() -> list[str]:
    root = resources.files("neurochan") / "configs"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def _load_config(ref: str) -> tuple[dict, str]:
    path = Path(ref)
    if path.exists():
        return json.loads(path.read_text()), path.stem
    name = ref[: -len(".json")] if ref.endswith(".json") else ref
    candidate = resources.files("neurochan") / "configs" / f"{name}.json"
    if candidate.is_file():
        return json.loads(candidate.read_text()), name
    raise ConfigError(f"config file or bundled name '{ref}' not found")


def run_config(ref: str, out_dir: str | None, seed_override: int | None) -> RunResult:
    cfg, cfg_id = _load_config(ref)
    kind = _require(cfg, "kind")
    if kind not in KINDS:
        raise ConfigError(f"config field 'kind' must be one of {KINDS}, got {kind!r}")
    seed = seed_override if seed_override is not None else cfg.get("seed")
    if seed is None and kind in SEEDED_KINDS:
        raise ConfigError(f"missing config field 'seed' (required for kind '{kind}')")
    out = Path(out_dir) if out_dir else Path("neurochan_out") / cfg_id
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[kind](cfg, out, cfg_id, seed)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="neurochan", description="Batch driver for wide-input control experiments."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("config", help="path to a JSON config, or a bundled config name")
    run_p.add_argument("--out", default=None, help="output directory (default neurochan_out/<name>)")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument(
        "--expect-pass",
        action="store_true",
        help="exit with status 2 if the experiment's own check does not pass",
    )
    sub.add_parser("list-examples", help="list the bundled experiment configs")
    args = parser.parse_args(argv)

    if args.command == "list-examples":
        for name in bundled_config_names():
            cfg, _ = _load_config(name)
            desc = cfg.get("description", "")
            print(f"{name}: {desc}" if desc else name)
        return 0

    try:
        result = run_config(args.config, args.out, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleError, DivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except NeurochanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for path in result.artifacts:
        print(f"wrote {path}")
    for note in result.notes:
        print(note)
    print("check: PASS" if result.passed else "check: FAIL")
    if args.expect_pass and not result.passed:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
