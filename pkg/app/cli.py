"""
Command line entry point: ``python -m app <command> ...``

Exit codes: 0 success, 1 a verification failed, 2 usage, parse or domain error.
"""
import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.api.models import McReport, MeasureParams
from app.api.models.mc_report import CSV_COLUMNS
from app.config.settings import config
from app.services import polymer_mc, whittaker_eval
from app.services.map_runner import APPLY_MODES, FORWARD_ONLY_EMIT, apply_mode
from app.services.verification import SUITES, random_stade_params, run_suite
from app.utils.errors import DomainError, GrskError, UsageError, VerificationFailure
from app.utils.exact_numerics import format_scalar

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class CliConfig(BaseModel):
    """Parsed command line, validated before dispatch"""
    model_config = ConfigDict(extra='forbid', arbitrary_types_allowed=True)

    command: Literal["apply", "verify", "polymer", "whittaker", "serve"]
    action: Optional[str] = None
    input: Optional[str] = None
    out: Optional[str] = None
    format: Literal["json", "csv"] = "json"
    seed: Optional[int] = None
    mode: Optional[Literal["grsk", "grsk-inverse", "sym", "tri", "tropical", "tropical-inverse"]] = None
    emit: Literal["matrix", "patterns"] = "matrix"
    suite: Optional[str] = None
    trials: Optional[int] = Field(default=None, ge=1)
    tol: Optional[float] = Field(default=None, gt=0)
    samples: Optional[int] = Field(default=None, ge=2)
    params: Optional[MeasureParams] = None
    experiment: Literal["pushforward", "z1", "sampler"] = "pushforward"
    n: Optional[int] = Field(default=None, ge=1)
    lam: Optional[List[complex]] = None
    nu: Optional[List[complex]] = None
    x: Optional[List[float]] = None
    s: Optional[complex] = None
    gamma: Optional[complex] = None
    kind: str = "square"

    @model_validator(mode='after')
    def check_command(self) -> 'CliConfig':
        if self.command == "apply":
            if self.mode is None or self.input is None:
                raise ValueError("apply needs --mode and an input file")
            if self.emit == "patterns" and self.mode in FORWARD_ONLY_EMIT:
                raise ValueError(f"--emit patterns is not available for mode {self.mode}")
        elif self.command == "verify":
            if self.suite is None:
                raise ValueError("verify needs --suite")
        elif self.command == "polymer":
            if self.params is None and self.experiment != "z1":
                raise ValueError("polymer needs model parameters")
        elif self.command == "whittaker" and self.action == "eval":
            if not self.lam or not self.x:
                raise ValueError("whittaker eval needs --lambda and --x")
        return self


# ---------------------------------------------------------------------------
# output

def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return _complex_json(value)
    return format_scalar(value)


def dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, default=_json_default) + "\n"


def dump_csv(header: List[str], rows: List[List[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def _complex_json(z: complex) -> Dict[str, str]:
    return {'re': format(z.real, ".17g"), 'im': format(z.imag, ".17g")}


def _mc_output(report: McReport, fmt: str) -> str:
    if fmt == "csv":
        return dump_csv(CSV_COLUMNS, report.csv_rows())
    return dump_json(report.to_dict())


# ---------------------------------------------------------------------------
# apply

def _read_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise UsageError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}")


def cmd_apply(cfg: CliConfig) -> int:
    payload = apply_mode(cfg.mode, _read_json(cfg.input), cfg.emit)
    _write(dump_json(payload), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(cfg: CliConfig) -> int:
    report = run_suite(cfg.suite, trials=cfg.trials, seed=cfg.seed, tol=cfg.tol, samples=cfg.samples)
    for line in report.summary_lines():
        print(line, file=sys.stderr if cfg.out is None else sys.stdout)
    if cfg.format == "csv":
        text = dump_csv(['check', 'passed'], [[c.name, c.passed] for c in report.checks])
    else:
        text = dump_json(report.to_dict())
    _write(text, cfg.out)
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# polymer

def cmd_polymer(cfg: CliConfig) -> int:
    seed = cfg.seed if cfg.seed is not None else 0
    if cfg.action == "sample":
        if cfg.params is None:
            raise UsageError("polymer sample needs model parameters")
        samples = cfg.samples or int(config.get_monte_carlo_config().get('samples', 100000))
        shapes = polymer_mc.sample_shapes(cfg.params, samples, seed)
        header = [f"x{k + 1}" for k in range(shapes.shape[1])]
        rows = [[format(v, ".17g") for v in row] for row in shapes.tolist()]
        if cfg.format == "csv":
            text = dump_csv(header, rows)
        else:
            text = dump_json({'params': cfg.params.model_dump(), 'seed': seed, 'samples': samples,
                              'columns': header, 'shapes': rows})
        _write(text, cfg.out)
        return EXIT_OK

    if cfg.experiment == "z1":
        alpha = cfg.params.alpha if cfg.params is not None else None
        if not alpha:
            raise UsageError("z1 experiment needs --alpha")
        report = polymer_mc.z1_symmetric_equivalence(alpha, cfg.samples, seed)
    elif cfg.experiment == "sampler":
        report = polymer_mc.check_sampler_means(cfg.params, cfg.samples, seed)
    else:
        report = polymer_mc.pushforward_check(cfg.params, cfg.samples, seed)
    _write(_mc_output(report, cfg.format), cfg.out)
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# whittaker

def cmd_whittaker(cfg: CliConfig) -> int:
    if cfg.action == "eval":
        n = cfg.n or len(cfg.x)
        if cfg.s is None:
            value, error = whittaker_eval.psi_with_error(n, cfg.lam, cfg.x)
        else:
            value, error = whittaker_eval.psi_s_with_error(n, cfg.lam, cfg.s, cfg.x)
        payload = {'n': n, 'lambda': [_complex_json(z) for z in cfg.lam], 'x': cfg.x,
                   'value': _complex_json(value), 'error_estimate': format(error, ".17g")}
        if cfg.s is not None:
            payload['s'] = _complex_json(cfg.s)
        _write(dump_json(payload), cfg.out)
        return EXIT_OK

    if cfg.lam:
        s = 1.0 if cfg.s is None else cfg.s.real
        results = [whittaker_eval.stade_identity_check(cfg.kind, nu=cfg.nu, lam=cfg.lam, gamma=cfg.gamma, s=s,
                                                       tol=cfg.tol)]
    else:
        gen = np.random.default_rng(cfg.seed if cfg.seed is not None else 0)
        results = []
        for _ in range(cfg.trials or 1):
            params = random_stade_params(cfg.kind, cfg.n or 2, gen)
            results.append(whittaker_eval.stade_identity_check(cfg.kind, tol=cfg.tol, **params))
    payload = {
        'kind': cfg.kind,
        'passed': all(r['passed'] for r in results),
        'checks': [{k: (_complex_json(v) if isinstance(v, complex) else v) for k, v in r.items()} for r in results],
    }
    _write(dump_json(payload), cfg.out)
    return EXIT_OK if payload['passed'] else EXIT_FAILED


def cmd_serve(cfg: CliConfig) -> int:
    from app.main import create_app

    api_config = config.get_api_config()
    host = api_config.get('host', '0.0.0.0')
    port = api_config.get('port', 12321)
    logger.info(f"Starting gRSK API server on {host}:{port}")
    create_app().run(host=host, port=port, debug=False)
    return EXIT_OK


COMMANDS = {
    'apply': cmd_apply,
    'verify': cmd_verify,
    'polymer': cmd_polymer,
    'whittaker': cmd_whittaker,
    'serve': cmd_serve,
}


# ---------------------------------------------------------------------------
# parsing

def _add_params_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", help="JSON file with the model parameters")
    parser.add_argument("--model", choices=["rect", "sym", "tri"], help="Random weight model")
    parser.add_argument("--theta-hat", type=float, nargs="+", help="Row parameters of the rect model")
    parser.add_argument("--theta", type=float, nargs="+", help="Column parameters of the rect model")
    parser.add_argument("--s", type=float, default=1.0, help="Anti-diagonal scale of the rect model")
    parser.add_argument("--alpha", type=float, nargs="+", help="Parameters of the sym and tri models")
    parser.add_argument("--zeta", type=float, help="Diagonal parameter of the sym model")
    parser.add_argument("--samples", type=int, help="Number of Monte Carlo draws")


def parse_complex(token: str) -> complex:
    """Complex number written with an i or j suffix, e.g. ``0.5+1i``"""
    return complex(token.strip().replace(' ', '').replace('i', 'j'))


class _SeparatedValues(argparse.Action):
    """Collects values given space- or comma-separated into one list"""
    parse = staticmethod(float)

    def __call__(self, parser, namespace, values, option_string=None):
        items = []
        for value in values:
            for token in value.split(','):
                if not token.strip():
                    continue
                try:
                    items.append(self.parse(token))
                except ValueError:
                    parser.error(f"{option_string}: cannot parse {token!r}")
        setattr(namespace, self.dest, items)


class _ComplexValues(_SeparatedValues):
    parse = staticmethod(parse_complex)


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="python -m app", description="Geometric RSK toolkit")
    parser.add_argument("--seed", type=int, help="Seed for random inputs and Monte Carlo streams")
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="Report format")
    parser.add_argument("--config", help="Alternative config.yaml")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    apply = sub.add_parser("apply", help="Apply or invert a map on a JSON file")
    apply.add_argument("input", help="Input JSON file")
    apply.add_argument("--mode", required=True, choices=APPLY_MODES)
    apply.add_argument("--emit", choices=["matrix", "patterns"], default="matrix")

    verify = sub.add_parser("verify", help="Run a verification suite")
    verify.add_argument("--suite", required=True, help=f"One of {', '.join(SUITES)}")
    verify.add_argument("--trials", type=int)
    verify.add_argument("--tol", type=float)
    verify.add_argument("--samples", type=int)

    polymer = sub.add_parser("polymer", help="Log-gamma polymer Monte Carlo")
    polymer_sub = polymer.add_subparsers(dest="action", required=True)
    polymer_sample = polymer_sub.add_parser("sample", help="Draw shape vectors")
    _add_params_args(polymer_sample)
    polymer_verify = polymer_sub.add_parser("verify", help="Compare draws with the predicted law")
    _add_params_args(polymer_verify)
    polymer_verify.add_argument("--experiment", choices=["pushforward", "z1", "sampler"], default="pushforward")

    whittaker = sub.add_parser("whittaker", help="Whittaker functions")
    whittaker_sub = whittaker.add_subparsers(dest="action", required=True)
    w_eval = whittaker_sub.add_parser("eval", help="Evaluate Psi_lambda(x) or Psi_{lambda;s}(x)")
    w_eval.add_argument("--n", type=int)
    w_eval.add_argument("--lambda", "--lam", dest="lam", nargs="+", action=_ComplexValues, required=True,
                        metavar="A+Bi", help="Comma- or space-separated, e.g. 0.5+1i,0.3")
    w_eval.add_argument("--x", nargs="+", action=_SeparatedValues, required=True)
    w_eval.add_argument("--s", type=parse_complex)
    w_verify = whittaker_sub.add_parser("verify", help="Check one integral identity by quadrature")
    w_verify.add_argument("--kind", default="square", help="square, rect or bf")
    w_verify.add_argument("--lambda", "--lam", dest="lam", nargs="+", action=_ComplexValues, metavar="A+Bi",
                          help="Omit to draw random admissible parameters")
    w_verify.add_argument("--n", type=int, help="Size of the random draws (m for the rectangular kind)")
    w_verify.add_argument("--trials", type=int, help="Number of random draws")
    w_verify.add_argument("--nu", nargs="+", action=_ComplexValues, metavar="A+Bi")
    w_verify.add_argument("--gamma", type=parse_complex)
    w_verify.add_argument("--s", type=parse_complex)
    w_verify.add_argument("--tol", type=float)

    sub.add_parser("serve", help="Start the HTTP API")
    return parser.parse_args(argv)


def _measure_params(args: argparse.Namespace) -> Optional[MeasureParams]:
    if getattr(args, 'params', None):
        data = _read_json(args.params)
        if not isinstance(data, dict):
            raise UsageError(f"{args.params} must hold a JSON object of model parameters")
        return MeasureParams(**data)
    model = getattr(args, 'model', None)
    if model is None:
        return None
    return MeasureParams(model=model, theta_hat=args.theta_hat, theta=args.theta, s=args.s,
                         alpha=args.alpha, zeta=args.zeta)


def build_config(args: argparse.Namespace) -> CliConfig:
    fields = {k: v for k, v in vars(args).items() if k in CliConfig.model_fields and v is not None}
    if args.command == "polymer":
        fields.pop('s', None)
        fields['params'] = _measure_params(args)
        if fields['params'] is None and args.alpha:
            # the z1 experiment only needs alpha
            fields['params'] = MeasureParams(model="tri", alpha=args.alpha)
    return CliConfig(**fields)


def _configure_logging(level: Optional[str]) -> None:
    level = level or config.get_processing_config().get('log_level', 'INFO')
    logging.basicConfig(
        level=getattr(logging, level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        if args.config:
            config.load_config(args.config)
        _configure_logging(args.log_level)
        config.validate_processing()
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DomainError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailure as e:
        logger.error(f"Verification failure: {e}")
        return EXIT_FAILED
    except GrskError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED
