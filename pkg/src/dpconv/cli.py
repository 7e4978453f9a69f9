"""Command-line frontend: conversions, composition sweeps, calibration, and
privacy-region data as deterministic CSV or JSON.

Exit codes: 0 success, 2 usage/validation error, 3 domain-precondition error.
An optional config file supplies `key=value` defaults mirroring the flags;
explicit flags always win. DPCONV_TOL overrides the default absolute
tolerance, and --tol overrides the environment.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .accountant import (
    CompositionQuery,
    GaussianMechanismSpec,
    improved_calibrate_sigma,
    improved_epsilon,
    ma_calibrate_sigma,
    ma_gaussian_epsilon,
    sgd_epsilon,
    subsampled_spec,
)
from .backend import BACKEND
from .conversion import delta_exact, epsilon_exact, epsilon_upper_bound, gamma_exact, gamma_lower_bound
from .numerics import DEFAULT_TOL, Tolerance
from .tradeoff import (
    gaussian_region_exact,
    gaussian_region_rdp_bound,
    gdp_epsilon,
    kl_region_boundary,
    sgd_area_difference,
    sgd_region_fdp,
    sgd_region_rdp,
    tau_grid,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    pass


class DomainPreconditionError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def _load_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                out[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    return out


class _Options:
    """Merged view of flags (win), config-file values, and defaults."""

    def __init__(self, ns: argparse.Namespace):
        self.ns = ns
        self.config = _load_config(ns.config) if getattr(ns, "config", None) else {}

    def get(self, key: str, conv, default=None, required: bool = False):
        flag_value = getattr(self.ns, key, None)
        if flag_value is not None:
            raw = flag_value
        elif key in self.config:
            raw = self.config[key]
        else:
            if required and default is None:
                raise UsageError(f"missing required option --{key.replace('_', '-')}")
            return default
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value for --{key.replace('_', '-')}: {exc}")


def _flag(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _float_list(raw) -> list[float]:
    items = [s for s in str(raw).split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(s) for s in items]


def _str_list(raw) -> list[str]:
    items = [s.strip() for s in str(raw).split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return items


def _tolerance(opts: _Options) -> Tolerance:
    abs_tol = opts.get("tol", float)
    if abs_tol is None:
        env = os.environ.get("DPCONV_TOL", "").strip()
        if env:
            try:
                abs_tol = float(env)
            except ValueError:
                raise UsageError(f"DPCONV_TOL is not a number: {env!r}")
    if abs_tol is None:
        return DEFAULT_TOL
    return Tolerance(abs_tol=abs_tol, rel_tol=DEFAULT_TOL.rel_tol, max_iters=DEFAULT_TOL.max_iters)


def _emit(opts: _Options, header: list[str], rows: list[list], kind: str,
          metadata: dict) -> None:
    """Write CSV (default) or JSON; `kind` is 'record' or 'sweep'."""
    fmt = opts.get("format", str, default="csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {fmt!r}")
    output = opts.get("output", str)

    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(cell) for cell in row) for row in rows]
        payload = "\n".join(lines) + "\n"
    else:
        objs = [dict(zip(header, row)) for row in rows]
        if kind == "record":
            record = objs[0] if objs else {}
            record["metadata"] = metadata
            payload = json.dumps(record, indent=2) + "\n"
        else:
            payload = json.dumps(objs, indent=2) + "\n"

    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        if fmt == "json":
            with open(output + ".meta.json", "w", encoding="utf-8", newline="") as fh:
                fh.write(json.dumps(metadata, indent=2) + "\n")
    else:
        sys.stdout.write(payload)


def _metadata(command: str, params: dict, tol: Tolerance) -> dict:
    return {
        "command": command,
        "version": __version__,
        "backend": BACKEND,
        "parameters": params,
        "tolerance": {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol,
                      "max_iters": tol.max_iters},
    }


def _cmd_convert(opts: _Options) -> None:
    direction = opts.ns.direction
    tol = _tolerance(opts)
    alpha = opts.get("alpha", float, required=True)
    gamma = opts.get("gamma", float)
    eps = opts.get("epsilon", float)
    delta = opts.get("delta", float)
    exact = opts.get("exact", _flag, default=False)
    bound = opts.get("bound", _flag, default=False)

    if direction == "rdp-to-dp":
        if gamma is None:
            raise UsageError("rdp-to-dp needs --gamma")
        if (delta is None) == (eps is None):
            raise UsageError("rdp-to-dp needs exactly one of --delta or --epsilon")
        if delta is not None:
            res = epsilon_exact(alpha, gamma, delta, tol) if exact \
                else epsilon_upper_bound(alpha, gamma, delta)
            params = {"alpha": alpha, "gamma": gamma, "delta": delta, "exact": exact}
        else:
            res = delta_exact(alpha, gamma, eps, tol)
            params = {"alpha": alpha, "gamma": gamma, "epsilon": eps, "exact": True}
    else:  # dp-to-rdp
        if eps is None or delta is None:
            raise UsageError("dp-to-rdp needs --epsilon and --delta")
        res = gamma_lower_bound(alpha, eps, delta) if bound else gamma_exact(alpha, eps, delta, tol)
        params = {"alpha": alpha, "epsilon": eps, "delta": delta, "bound": bound}

    header = ["value", "minimizer_p", "method"]
    rows = [[res.value, res.minimizer_p, res.method]]
    _emit(opts, header, rows, "record", _metadata(f"convert {direction}", params, tol))


def _parse_t_max(raw: str, q: float | None) -> tuple[int, bool]:
    text = str(raw).strip()
    epochs = text.endswith(("e", "E"))
    if epochs:
        if q is None:
            raise UsageError("epoch-suffixed --T-max needs --q")
        value = float(text[:-1])
        return int(round(value / q)), True
    return int(float(text)), False


def _cmd_compose(opts: _Options) -> None:
    if opts.ns.mechanism != "gaussian":
        raise UsageError(f"unknown mechanism {opts.ns.mechanism!r}")
    tol = _tolerance(opts)
    sigma = opts.get("sigma", float, required=True)
    delta = opts.get("delta", float, required=True)
    q = opts.get("q", float)
    method = opts.get("method", str, default="both")
    if method not in ("ma", "improved", "both"):
        raise UsageError(f"--method must be ma, improved, or both, got {method!r}")
    raw_t = opts.get("T_max", str, required=True)
    t_max, from_epochs = _parse_t_max(raw_t, q)
    query = CompositionQuery(t_max, delta)
    stride = opts.get("stride", int, default=max(1, query.rounds // 1000))

    spec = subsampled_spec(q, sigma) if q is not None else None
    rho = spec.rho_q if spec is not None else GaussianMechanismSpec(sigma).rho

    def eps_ma(T: int) -> float:
        if spec is not None:
            return sgd_epsilon(spec, T, delta, "ma")
        return ma_gaussian_epsilon(rho, T, delta)

    def eps_improved(T: int) -> float:
        if spec is not None:
            return sgd_epsilon(spec, T, delta, "improved")
        return improved_epsilon(rho, T, delta, tol)

    header = ["T"]
    if method in ("ma", "both"):
        header.append("eps_ma")
    if method in ("improved", "both"):
        header.append("eps_improved")
    rows = []
    for T in range(stride, t_max + 1, stride):
        row: list = [T]
        if method in ("ma", "both"):
            row.append(eps_ma(T))
        if method in ("improved", "both"):
            row.append(eps_improved(T))
        rows.append(row)

    params = {"sigma": sigma, "delta": delta, "q": q, "method": method,
              "T_max": t_max, "stride": stride, "rho": rho,
              "T_max_given_in_epochs": from_epochs}
    if q is not None:
        params["epochs_max"] = t_max * q
    _emit(opts, header, rows, "sweep", _metadata("compose gaussian", params, tol))


def _cmd_calibrate(opts: _Options) -> None:
    tol = _tolerance(opts)
    eps = opts.get("epsilon", float, required=True)
    delta = opts.get("delta", float, required=True)
    T = opts.get("T", int, required=True)
    CompositionQuery(T, delta)
    method = opts.get("method", str, default="both")
    if method not in ("ma", "improved", "both"):
        raise UsageError(f"--method must be ma, improved, or both, got {method!r}")

    rows = []
    if method in ("ma", "both"):
        sigma = ma_calibrate_sigma(eps, delta, T)
        rows.append(["ma", sigma, sigma * sigma])
    if method in ("improved", "both"):
        if not (0.0 < delta < 1.0 and eps > 2.0 * delta * math.log(1.0 / delta)):
            raise DomainPreconditionError(
                f"improved calibration needs eps > 2 delta log(1/delta); "
                f"got eps={eps}, delta={delta}")
        try:
            sigma = improved_calibrate_sigma(eps, delta, T)
        except ValueError as exc:
            raise DomainPreconditionError(str(exc))
        rows.append(["improved", sigma, sigma * sigma])

    params = {"epsilon": eps, "delta": delta, "T": T, "method": method}
    _emit(opts, ["method", "sigma", "sigma_squared"], rows, "record" if len(rows) == 1 else "sweep",
          _metadata("calibrate", params, tol))


_GAUSSIAN_BOUNDS = ("exact", "rdp", "kl")
_SGD_BOUNDS = ("rdp", "fdp")


def _cmd_region(opts: _Options) -> None:
    tol = _tolerance(opts)
    mechanism = opts.get("mechanism", str, required=True)
    sigma = opts.get("sigma", float, required=True)
    T = opts.get("T", int, required=True)
    q = opts.get("q", float)
    grid = opts.get("grid", int, default=1001)
    alphas = opts.get("alphas", _float_list)

    if mechanism == "gaussian":
        valid = _GAUSSIAN_BOUNDS
    elif mechanism == "sgd":
        valid = _SGD_BOUNDS
        if q is None:
            raise UsageError("--mechanism sgd needs --q")
    else:
        raise UsageError(f"--mechanism must be gaussian or sgd, got {mechanism!r}")
    bounds = opts.get("bounds", _str_list, default=list(valid))
    bad = [b for b in bounds if b not in valid]
    if bad:
        raise UsageError(f"unsupported bounds for {mechanism}: {','.join(bad)} "
                         f"(valid: {','.join(valid)})")

    taus = tau_grid(grid)
    columns = {}
    if mechanism == "gaussian":
        rho = GaussianMechanismSpec(sigma).rho
        for b in bounds:
            if b == "exact":
                columns[b] = gaussian_region_exact(rho, T, taus)
            elif b == "rdp":
                columns[b] = gaussian_region_rdp_bound(rho, T, taus, alphas)
            else:
                columns[b] = kl_region_boundary(rho * T, taus)
    else:
        for b in bounds:
            if b == "rdp":
                columns[b] = sgd_region_rdp(q, sigma, T, taus)
            else:
                columns[b] = sgd_region_fdp(q, sigma, T, taus)

    header = ["tau"] + list(bounds)
    rows = [[taus[i]] + [float(columns[b][i]) for b in bounds] for i in range(len(taus))]
    params = {"mechanism": mechanism, "sigma": sigma, "T": T, "q": q,
              "bounds": list(bounds), "grid": grid}
    _emit(opts, header, rows, "sweep", _metadata("region", params, tol))


def _cmd_compare(opts: _Options) -> None:
    tol = _tolerance(opts)
    mode = opts.ns.mode
    q = opts.get("q", float, required=True)
    if mode == "areas":
        sigmas = opts.get("sigma_list", _float_list, required=True)
        tqs = opts.get("Tq_list", _float_list, required=True)
        header = ["sigma"] + [f"Tq{_fmt(tq)}" for tq in tqs]
        rows = []
        for sigma in sigmas:
            row: list = [sigma]
            for tq in tqs:
                row.append(sgd_area_difference(q, sigma, int(round(tq / q))))
            rows.append(row)
        params = {"q": q, "sigma_list": sigmas, "Tq_list": tqs}
        _emit(opts, header, rows, "sweep", _metadata("compare areas", params, tol))
    elif mode == "gdp":
        sigma = opts.get("sigma", float, required=True)
        T = opts.get("T", int, required=True)
        delta = opts.get("delta", float, required=True)
        spec = subsampled_spec(q, sigma)
        eps_imp = improved_epsilon(spec.rho_q, T, delta, tol)
        mu = q * math.sqrt(T * math.expm1(1.0 / (sigma * sigma)))
        eps_gdp = gdp_epsilon(mu, delta, tol)
        params = {"q": q, "sigma": sigma, "T": T, "delta": delta, "mu": mu}
        _emit(opts, ["eps_improved", "eps_gdp"], [[eps_imp, eps_gdp]], "record",
              _metadata("compare gdp", params, tol))
    else:
        raise UsageError(f"unknown compare mode {mode!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", default=None, help="csv (default) or json")
    parser.add_argument("--output", default=None, help="write output to this path")
    parser.add_argument("--config", default=None, help="key=value defaults file; flags win")
    parser.add_argument("--tol", default=None, help="absolute tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpconv",
        description="Convert between DP variants, compose Gaussian mechanisms, "
                    "calibrate noise, and emit privacy-region data.")
    parser.add_argument("--version", action="version", version=f"dpconv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="RDP <-> approximate-DP conversion")
    p.add_argument("direction", choices=["rdp-to-dp", "dp-to-rdp"])
    p.add_argument("--alpha", default=None)
    p.add_argument("--gamma", default=None)
    p.add_argument("--epsilon", default=None)
    p.add_argument("--delta", default=None)
    p.add_argument("--exact", action="store_true", default=None,
                   help="use the exact bisection instead of the closed-form bound")
    p.add_argument("--bound", action="store_true", default=None,
                   help="dp-to-rdp: emit the closed-form lower bound instead of the exact value")
    _add_common(p)
    p.set_defaults(handler=_cmd_convert)

    p = sub.add_parser("compose", help="epsilon(T) sweep for composed mechanisms")
    p.add_argument("mechanism", choices=["gaussian"])
    p.add_argument("--sigma", default=None)
    p.add_argument("--T-max", dest="T_max", default=None,
                   help="max rounds; suffix 'e' counts epochs (needs --q)")
    p.add_argument("--delta", default=None)
    p.add_argument("--q", default=None, help="subsampling rate (switches to noisy-SGD accounting)")
    p.add_argument("--method", default=None, help="ma, improved, or both (default)")
    p.add_argument("--stride", default=None, help="row stride (default: about 1000 rows)")
    _add_common(p)
    p.set_defaults(handler=_cmd_compose)

    p = sub.add_parser("calibrate", help="noise level for a target (epsilon, delta, T)")
    p.add_argument("--epsilon", default=None)
    p.add_argument("--delta", default=None)
    p.add_argument("--T", dest="T", default=None)
    p.add_argument("--method", default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_calibrate)

    p = sub.add_parser("region", help="privacy-region boundary data on a tau grid")
    p.add_argument("--mechanism", default=None, help="gaussian or sgd")
    p.add_argument("--sigma", default=None)
    p.add_argument("--T", dest="T", default=None)
    p.add_argument("--q", default=None)
    p.add_argument("--bounds", default=None,
                   help="comma list: gaussian exact,rdp,kl; sgd rdp,fdp")
    p.add_argument("--grid", default=None, help="number of tau points (default 1001)")
    p.add_argument("--alphas", default=None, help="comma list of orders for the gaussian rdp bound")
    _add_common(p)
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("compare", help="region-area matrix or improved-vs-GDP epsilon")
    p.add_argument("mode", choices=["areas", "gdp"])
    p.add_argument("--q", default=None)
    p.add_argument("--sigma", default=None)
    p.add_argument("--sigma-list", dest="sigma_list", default=None)
    p.add_argument("--Tq-list", dest="Tq_list", default=None)
    p.add_argument("--T", dest="T", default=None)
    p.add_argument("--delta", default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        ns.handler(_Options(ns))
    except UsageError as exc:
        print(f"dpconv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainPreconditionError as exc:
        print(f"dpconv: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"dpconv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
