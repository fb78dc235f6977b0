"""Command-line interface: verification suites and detection-rate sweeps.

Subcommands
-----------
verify       run the cross-check suites (identities, decompositions, oracles)
pfa-curves   emit false-alarm coefficient curves over a mode-count grid (CSV)
pmd-curve    emit missed-detection probabilities over a reflectivity grid (CSV)
state-dump   serialize a pair state in the line-per-term dump format

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 size cap
exceeded.
"""

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass

from .combinat import (
    LogProb,
    binomial,
    count_compositions,
    falling_ratio_logs,
    sum_log_probs,
)
from .detection import (
    TableNoise,
    ThermalNoise,
    p_fa_closed,
    p_fa_oracle,
    p_md_closed,
    p_md_oracle,
)
from .fock import (
    AMPLITUDE_CAP,
    IDLER,
    KEY_BYTES_BUDGET,
    SIGNAL,
    AmplitudeCapError,
    SparseState,
    combine,
)
from .loss import returned_mixture, beamsplitter_oracle, split_by_environment
from .states import (
    loss_identity_residual,
    pair_create,
    pair_state_direct,
    pair_state_recursive,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_CAP = 3

DEFAULT_M_MAX = 100_000
DEFAULT_M_POINTS = 50
DEFAULT_N_VALUES = [10, 100, 1000]
DEFAULT_NOISE = "thermal:1"

_CONFIG_KEYS = {
    "n", "m_min", "m_max", "m_points", "m_list", "noise",
    "eta", "eta_min", "eta_max", "eta_points", "csv", "svg",
}


# ---------------------------------------------------------------------------
# formatting

def fmt_float(value: float) -> str:
    return f"{value:.17g}"


def fmt_log(prob: LogProb) -> str:
    """Decimal mantissa/exponent form with 17 significant digits.

    Derived from the log-scale value, so magnitudes far below the float64
    underflow point stay strictly positive in the output.
    """
    if prob.is_zero:
        return "0"
    log10 = prob.log_value / math.log(10.0)
    exp10 = math.floor(log10)
    mantissa = 10.0 ** (log10 - exp10)
    if mantissa >= 10.0:
        mantissa /= 10.0
        exp10 += 1
    if mantissa < 1.0:
        mantissa *= 10.0
        exp10 -= 1
    text = f"{mantissa:.16f}"
    if text.startswith("10"):
        # rounding in the formatter pushed the mantissa to 10.0...
        text = "1.0000000000000000"
        exp10 += 1
    return f"{text}e{exp10:+d}"


# ---------------------------------------------------------------------------
# config and grids

def load_config(path) -> dict:
    with open(path) as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data


def merge_settings(args, defaults: dict) -> dict:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    settings = dict(defaults)
    if getattr(args, "config", None):
        settings.update(load_config(args.config))
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings


def log_grid(m_min: int, m_max: int, points: int) -> list[int]:
    """Log-spaced integer grid, ascending, deduplicated after rounding."""
    if m_min < 1:
        raise ValueError("m_min must be at least 1")
    if m_max < m_min:
        raise ValueError("m_max must not be below m_min")
    if points < 2:
        raise ValueError("need at least 2 grid points")
    if m_min == m_max:
        return [m_min]
    lo, hi = math.log(m_min), math.log(m_max)
    raw = (round(math.exp(lo + i * (hi - lo) / (points - 1))) for i in range(points))
    return sorted({max(1, value) for value in raw})


def linear_grid(low: float, high: float, points: int) -> list[float]:
    if points < 2:
        raise ValueError("need at least 2 grid points")
    if high < low:
        raise ValueError("grid upper bound below lower bound")
    step = (high - low) / (points - 1)
    return [low + i * step for i in range(points)]


def parse_noise_spec(text: str):
    """Parse 'thermal:<nbar>' or 'table:<path>' into a reusable spec."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"noise spec {text!r} needs the form thermal:<nbar> or table:<path>")
    if kind == "thermal":
        nbar = float(rest)
        if nbar < 0:
            raise ValueError("thermal noise needs nbar >= 0")
        return ("thermal", nbar)
    if kind == "table":
        return ("table", TableNoise.from_file(rest).values)
    raise ValueError(f"unknown noise kind {kind!r}")


def make_noise(spec, modes: int):
    kind, payload = spec
    if kind == "thermal":
        return ThermalNoise(payload, modes)
    return TableNoise(payload)


def parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def as_number_list(value) -> list:
    """Accept a scalar, list, or comma-separated string from flag or config."""
    if isinstance(value, str):
        return [float(part) for part in value.split(",") if part.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return list(value)


# ---------------------------------------------------------------------------
# verification

@dataclass
class CheckResult:
    name: str
    worst: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance


def _random_state(rng: random.Random, modes: int, registers, max_count: int) -> SparseState:
    terms = []
    for _ in range(3):
        counts = tuple(
            tuple(rng.randint(0, max_count) for _ in range(modes)) for _ in registers
        )
        terms.append((counts, complex(rng.uniform(-1, 1), rng.uniform(-1, 1))))
    return SparseState.from_terms(modes, registers, terms)


def _max_amp_diff(a: SparseState, b: SparseState) -> float:
    return combine([(1.0, a), (-1.0, b)]).max_abs()


def run_verification(max_n: int, max_m: int) -> list[CheckResult]:
    """Cross-check every identity the package relies on, up to the given sizes."""
    rng = random.Random(20240901)
    etas = (0.3, 0.7)
    table = TableNoise(tuple(0.12 / (k + 1) for k in range(max(max_n, 1))))
    worst = {
        "pair-creation commutator (signal)": 0.0,
        "pair-creation commutator (idler)": 0.0,
        "signal-loss identity": 0.0,
        "direct vs recursive build": 0.0,
        "amplitude uniformity": 0.0,
        "mixture completeness": 0.0,
        "component orthonormality": 0.0,
        "beamsplitter decomposition": 0.0,
        "false alarm: closed vs oracle": 0.0,
        "missed detection: closed vs oracle": 0.0,
    }

    for modes in range(1, max_m + 1):
        for photons in range(0, max_n + 1):
            # operator identities on a random state
            probe = _random_state(rng, modes, (IDLER, SIGNAL), max_count=2)
            for j in range(modes):
                raised = pair_create(probe)
                left = raised.annihilate(SIGNAL, j)
                right = pair_create(probe.annihilate(SIGNAL, j))
                expected = probe.create(IDLER, j)
                diff = combine([(1.0, left), (-1.0, right), (-1.0, expected)]).max_abs()
                worst["pair-creation commutator (signal)"] = max(
                    worst["pair-creation commutator (signal)"], diff)
                left_i = raised.annihilate(IDLER, j)
                right_i = pair_create(probe.annihilate(IDLER, j))
                expected_i = probe.create(SIGNAL, j)
                diff_i = combine([(1.0, left_i), (-1.0, right_i), (-1.0, expected_i)]).max_abs()
                worst["pair-creation commutator (idler)"] = max(
                    worst["pair-creation commutator (idler)"], diff_i)

            if photons >= 1:
                for j in range(modes):
                    worst["signal-loss identity"] = max(
                        worst["signal-loss identity"],
                        loss_identity_residual(photons, modes, j))

            direct = pair_state_direct(photons, modes)
            recursive = pair_state_recursive(photons, modes)
            worst["direct vs recursive build"] = max(
                worst["direct vs recursive build"], _max_amp_diff(direct, recursive))
            expected_amp = 1.0 / math.sqrt(count_compositions(photons, modes))
            for _, amp in direct.terms():
                worst["amplitude uniformity"] = max(
                    worst["amplitude uniformity"], abs(amp - expected_amp))

            for index, eta in enumerate(etas):
                mixture = returned_mixture(photons, modes, eta)
                worst["mixture completeness"] = max(
                    worst["mixture completeness"],
                    abs(sum(c.weight for c in mixture) - 1.0))
                if index == 0:
                    # the normalized component states carry no eta dependence
                    for a in range(len(mixture)):
                        for b in range(a, len(mixture)):
                            overlap = mixture[a].state.inner(mixture[b].state)
                            target = 1.0 if a == b else 0.0
                            worst["component orthonormality"] = max(
                                worst["component orthonormality"], abs(overlap - target))
                grouped = split_by_environment(beamsplitter_oracle(photons, modes, eta))
                by_label = {c.absorbed: c for c in grouped}
                for component in mixture:
                    other = by_label.get(component.absorbed)
                    if other is None:
                        worst["beamsplitter decomposition"] = max(
                            worst["beamsplitter decomposition"], component.weight)
                        continue
                    worst["beamsplitter decomposition"] = max(
                        worst["beamsplitter decomposition"],
                        abs(component.weight - other.weight),
                        _max_amp_diff(component.state, other.state))

                worst["missed detection: closed vs oracle"] = max(
                    worst["missed detection: closed vs oracle"],
                    abs(p_md_oracle(photons, modes, eta) - p_md_closed(photons, eta)))

            for noise in (ThermalNoise(0.5, modes), table):
                worst["false alarm: closed vs oracle"] = max(
                    worst["false alarm: closed vs oracle"],
                    abs(p_fa_closed(photons, modes, noise)
                        - p_fa_oracle(photons, modes, noise)))

    tolerances = {
        "mixture completeness": 1e-10,
        "false alarm: closed vs oracle": 1e-10,
        "missed detection: closed vs oracle": 1e-10,
    }
    return [
        CheckResult(name, value, tolerances.get(name, 1e-12))
        for name, value in worst.items()
    ]


def _approx_sci(value: int) -> str:
    """Scientific rendering of an arbitrarily large integer."""
    digits = len(str(value))
    lead = str(value)[:3]
    return f"{lead[0]}.{lead[1:]}e+{digits - 1}"


def cmd_verify(args) -> int:
    max_n, max_m = args.max_n, args.max_m
    if max_n < 0 or max_m < 1:
        raise ValueError("verify needs --max-n >= 0 and --max-m >= 1")
    oracle_size = binomial(max_n + 2 * max_m - 1, max_n)
    if oracle_size > AMPLITUDE_CAP or oracle_size * 3 * max_m * 2 > KEY_BYTES_BUDGET:
        print(
            f"refusing verification at N={max_n}, M={max_m}: the beamsplitter "
            f"oracle would need {_approx_sci(oracle_size)} amplitudes "
            f"(cap {AMPLITUDE_CAP}); lower --max-n/--max-m",
            file=sys.stderr,
        )
        return EXIT_CAP
    results = run_verification(max_n, max_m)
    width = max(len(r.name) for r in results)
    print(f"verification up to N={max_n}, M={max_m}")
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.name:<{width}}  worst={result.worst:.3e}  "
              f"tol={result.tolerance:.0e}  {status}")
    if all(r.passed for r in results):
        print("all checks passed")
        return EXIT_OK
    print("verification FAILED", file=sys.stderr)
    return EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# curve sweeps

def _pfa_cell(photons: int, modes: int, noise_spec) -> dict[str, LogProb]:
    term_logs = falling_ratio_logs(photons, modes)
    noise = make_noise(noise_spec, modes)
    entries = {f"term:{k}": term_logs[k - 1] for k in range(1, photons + 1)}
    entries["baseline:1_over_M"] = LogProb(-math.log(modes))
    if photons > 0:
        entries["baseline:N_over_M"] = LogProb(math.log(photons) - math.log(modes))
    else:
        entries["baseline:N_over_M"] = LogProb(-math.inf)
    entries["total"] = sum_log_probs(
        noise.arrangement_log(k) * term_logs[k - 1] for k in range(1, photons + 1)
    )
    return entries


def pfa_rows(n_values, grid_for, noise_spec):
    """Long-format rows (series, N, M, formatted value), ordered by (N, M, series)."""
    rows = []
    for photons in sorted(set(n_values)):
        for modes in grid_for(photons):
            entries = _pfa_cell(photons, modes, noise_spec)
            for series in sorted(entries):
                rows.append((series, photons, modes, fmt_log(entries[series])))
    return rows


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as handle:
            handle.write(text)


def cmd_pfa_curves(args) -> int:
    defaults = {
        "n": DEFAULT_N_VALUES,
        "m_min": None,
        "m_max": DEFAULT_M_MAX,
        "m_points": DEFAULT_M_POINTS,
        "m_list": None,
        "noise": DEFAULT_NOISE,
        "csv": None,
        "svg": None,
    }
    settings = merge_settings(args, defaults)
    n_values = [int(n) for n in as_number_list(settings["n"])]
    if any(n < 0 for n in n_values):
        raise ValueError("photon numbers must be non-negative")
    noise_spec = parse_noise_spec(settings["noise"])

    if settings["m_list"] is not None:
        explicit = sorted({int(m) for m in as_number_list(settings["m_list"])})
        if not explicit or explicit[0] < 1:
            raise ValueError("m_list needs positive mode counts")
        grid_for = lambda photons: explicit
    else:
        m_max = int(settings["m_max"])
        m_points = int(settings["m_points"])
        fixed_min = settings["m_min"]

        def grid_for(photons, _mx=m_max, _pts=m_points, _mn=fixed_min):
            low = int(_mn) if _mn is not None else max(photons, 1)
            return log_grid(low, _mx, _pts)

    rows = pfa_rows(n_values, grid_for, noise_spec)
    text = "series,N,M,value\n" + "".join(
        f"{series},{photons},{modes},{value}\n" for series, photons, modes, value in rows
    )
    _write_text(settings["csv"], text)
    if settings["svg"]:
        render_svg(settings["svg"], rows)
    return EXIT_OK


def cmd_pmd_curve(args) -> int:
    defaults = {
        "n": DEFAULT_N_VALUES,
        "eta": None,
        "eta_min": 0.0,
        "eta_max": 1.0,
        "eta_points": 101,
        "csv": None,
    }
    settings = merge_settings(args, defaults)
    n_values = sorted({int(n) for n in as_number_list(settings["n"])})
    if any(n < 0 for n in n_values):
        raise ValueError("photon numbers must be non-negative")
    if settings["eta"] is not None:
        etas = sorted({float(e) for e in as_number_list(settings["eta"])})
    else:
        etas = linear_grid(float(settings["eta_min"]), float(settings["eta_max"]),
                           int(settings["eta_points"]))
    if any(not 0.0 <= eta <= 1.0 for eta in etas):
        raise ValueError("eta values must lie in [0, 1]")
    lines = ["N,eta,p_md\n"]
    for photons in n_values:
        for eta in etas:
            lines.append(f"{photons},{fmt_float(eta)},{fmt_float(p_md_closed(photons, eta))}\n")
    _write_text(settings["csv"], "".join(lines))
    return EXIT_OK


def cmd_state_dump(args) -> int:
    state = pair_state_direct(args.n, args.m)
    if args.out is None:
        for line in state.dump_lines():
            sys.stdout.write(line + "\n")
    else:
        state.dump(args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# svg rendering

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def render_svg(path, rows) -> None:
    """Minimal static log-log chart of the sweep rows; the CSV is the contract."""
    series: dict[str, list[tuple[int, LogProb]]] = {}
    for name, photons, modes, value in rows:
        if value == "0":
            continue
        mantissa, _, exponent = value.partition("e")
        log10 = float(exponent) + math.log10(float(mantissa))
        series.setdefault(f"N={photons} {name}", []).append((modes, log10))
    points = [p for pts in series.values() for p in pts]
    if not points:
        _write_text(path, "<svg xmlns='http://www.w3.org/2000/svg'/>\n")
        return
    x_lo = min(math.log10(m) for m, _ in points)
    x_hi = max(math.log10(m) for m, _ in points)
    y_lo = min(v for _, v in points)
    y_hi = max(v for _, v in points)
    if x_hi == x_lo:
        x_hi += 1.0
    if y_hi == y_lo:
        y_hi += 1.0
    width, height, margin = 880, 560, 70

    def to_xy(modes, log10v):
        x = margin + (math.log10(modes) - x_lo) / (x_hi - x_lo) * (width - 2 * margin)
        y = height - margin - (log10v - y_lo) / (y_hi - y_lo) * (height - 2 * margin)
        return x, y

    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}'>",
        f"<rect x='{margin}' y='{margin}' width='{width - 2 * margin}' "
        f"height='{height - 2 * margin}' fill='none' stroke='#333'/>",
        f"<text x='{width // 2}' y='{height - 20}' text-anchor='middle' "
        f"font-size='13'>log10 modes</text>",
        f"<text x='18' y='{height // 2}' font-size='13' "
        f"transform='rotate(-90 18 {height // 2})' text-anchor='middle'>log10 value</text>",
    ]
    for tick in range(math.ceil(x_lo), math.floor(x_hi) + 1):
        x, _ = to_xy(10 ** tick, y_lo)
        parts.append(f"<line x1='{x:.1f}' y1='{height - margin}' x2='{x:.1f}' "
                     f"y2='{height - margin + 6}' stroke='#333'/>")
        parts.append(f"<text x='{x:.1f}' y='{height - margin + 20}' text-anchor='middle' "
                     f"font-size='11'>1e{tick}</text>")
    for index, (label, pts) in enumerate(sorted(series.items())):
        color = _PALETTE[index % len(_PALETTE)]
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in (to_xy(m, v) for m, v in sorted(pts)))
        parts.append(f"<polyline points='{coords}' fill='none' stroke='{color}' "
                     f"stroke-width='1.2'><title>{label}</title></polyline>")
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinfock",
        description="Loss-resilient photon-pair states: verification and detection sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the cross-check suites")
    p_verify.add_argument("--max-n", type=int, default=3, help="largest photon number")
    p_verify.add_argument("--max-m", type=int, default=3, help="largest mode count")
    p_verify.set_defaults(func=cmd_verify)

    p_pfa = sub.add_parser("pfa-curves", help="false-alarm curves over a mode grid (CSV)")
    p_pfa.add_argument("--n", action="append", type=int, help="photon number (repeatable)")
    p_pfa.add_argument("--m-min", dest="m_min", type=int, help="grid lower bound (default: N)")
    p_pfa.add_argument("--m-max", dest="m_max", type=int, help=f"grid upper bound (default {DEFAULT_M_MAX})")
    p_pfa.add_argument("--m-points", dest="m_points", type=int,
                       help=f"log-spaced point count (default {DEFAULT_M_POINTS})")
    p_pfa.add_argument("--m-list", dest="m_list", type=parse_int_list,
                       help="explicit comma-separated mode counts (overrides the grid)")
    p_pfa.add_argument("--noise", help="thermal:<nbar> or table:<path> (default thermal:1)")
    p_pfa.add_argument("--csv", help="CSV output path (default stdout)")
    p_pfa.add_argument("--svg", help="optional SVG chart path")
    p_pfa.add_argument("--config", help="JSON config file; flags override its values")
    p_pfa.set_defaults(func=cmd_pfa_curves)

    p_pmd = sub.add_parser("pmd-curve", help="missed-detection curve over reflectivity (CSV)")
    p_pmd.add_argument("--n", action="append", type=int, help="photon number (repeatable)")
    p_pmd.add_argument("--eta", action="append", type=float,
                       help="explicit reflectivity value (repeatable)")
    p_pmd.add_argument("--eta-min", dest="eta_min", type=float, help="grid lower bound (default 0)")
    p_pmd.add_argument("--eta-max", dest="eta_max", type=float, help="grid upper bound (default 1)")
    p_pmd.add_argument("--eta-points", dest="eta_points", type=int,
                       help="linear grid point count (default 101)")
    p_pmd.add_argument("--csv", help="CSV output path (default stdout)")
    p_pmd.add_argument("--config", help="JSON config file; flags override its values")
    p_pmd.set_defaults(func=cmd_pmd_curve)

    p_dump = sub.add_parser("state-dump", help="serialize a pair state")
    p_dump.add_argument("--n", type=int, required=True, help="photon number")
    p_dump.add_argument("--m", type=int, required=True, help="mode count")
    p_dump.add_argument("--out", help="output path (default stdout)")
    p_dump.set_defaults(func=cmd_state_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        return args.func(args)
    except AmplitudeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
