"""``maxitive`` command-line interface.

Exit codes: 0 success, 1 axiom check failed, 2 parse error, 3 validation
error, 4 optimizer failure, 5 I/O error.  Failures print a message and a
one-line JSON error record on stderr.
"""

import argparse
from dataclasses import dataclass, field
import hashlib
import json
import math
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__, fixtures
from . import io as mio
from .distance import distance_table
from .errors import MaxitiveError, OptimizerFailure, ParseError, ValidationError
from .models import logistic_model, normal_model, quadratic_model
from .plausibility import Axis, DiscreteDistribution, GridDensity, check_axioms, normalize
from .profiler import Coordinate, LinearCombination, ProfileOptions, profile
from .pushforward import NumericMap, pushforward
from .semiring import ADDITIVE, MAXITIVE
from .tropical import CostMeasure, bellman_iterate, from_weights, tropical_bayes

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_OPTIMIZER = 4
EXIT_IO = 5

SUBCOMMANDS = (
    "axioms",
    "pushforward",
    "profile",
    "compare-modes",
    "distance",
    "tropical-bayes",
    "bellman",
    "suspects-demo",
)

NAMED_MAPS = {
    "sum": lambda p: p.sum(axis=1),
    "mean": lambda p: p.mean(axis=1),
    "product": lambda p: p.prod(axis=1),
    "max": lambda p: p.max(axis=1),
    "min": lambda p: p.min(axis=1),
    "norm": lambda p: np.sqrt((p**2).sum(axis=1)),
    "first": lambda p: p[:, 0],
}

MANIFEST_NAME = "run_manifest.json"


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    output: str = None
    seed: int = 0
    fmt: str = None
    mode: str = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ParseError(f"unknown subcommand {self.subcommand!r}")
        if self.options.get("fixture") and self.inputs:
            raise ParseError("give either --fixture or --input, not both")
        for name in ("xtol", "ftol", "ctol"):
            v = self.options.get(name)
            if v is not None and not v > 0:
                raise ValidationError(f"--{name} must be positive")


def parse_t_grid(text):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ParseError(f"t grid must look like lo:hi:count, got {text!r}") from None
    if count < 1 or (count > 1 and not lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError(f"t grid {text!r} needs lo < hi and count >= 1")
    return np.linspace(lo, hi, count)


def parse_interest(text, dim):
    kind, _, arg = text.partition(":")
    try:
        if kind == "coordinate":
            return Coordinate(int(arg))
        if kind == "linear":
            return LinearCombination([float(x) for x in arg.split(",")])
    except ValueError:
        pass
    raise ParseError(f"interest must be coordinate:i or linear:c1,c2,..., got {text!r}")


def parse_points(text, numeric):
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if numeric:
            try:
                pts.append(tuple(float(x) for x in chunk.split(",")))
            except ValueError:
                raise ParseError(f"bad numeric point {chunk!r}") from None
        else:
            pts.append(chunk)
    if len(pts) < 2:
        raise ParseError("need at least two points")
    return pts


class _Run:
    """State for one invocation: loaded inputs and their hashes."""

    def __init__(self, config):
        self.config = config
        self.opt = config.options
        self.hashes = []

    def read(self, path):
        with open(path, "rb") as fh:
            data = fh.read()
        self.hashes.append({"path": str(path), "sha256": hashlib.sha256(data).hexdigest()})
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError(f"{path}: not UTF-8 text") from None
        return mio.parse_json(text, str(path))

    def _input(self, k=0, required=True):
        if len(self.config.inputs) > k:
            return self.read(self.config.inputs[k])
        if required:
            raise ParseError(f"{self.config.subcommand} needs --input")
        return None

    def _fixture(self):
        return self.opt.get("fixture")

    # loaders

    def distribution(self):
        fx = self._fixture()
        if fx == "suspects" or (fx is None and not self.config.inputs and self.config.subcommand == "axioms"):
            dist = fixtures.suspects(MAXITIVE)
        elif fx is not None:
            raise ParseError(f"fixture {fx!r} is not a distribution (use suspects)")
        else:
            dist = mio.distribution_from_doc(self._input())
        if self.config.mode in ("additive", "maxitive"):
            dist = _with_mode(dist, self.config.mode)
        return dist

    def transform(self, dist):
        if self.opt.get("map"):
            name = self.opt["map"]
            if name not in NAMED_MAPS:
                raise ParseError(f"unknown map {name!r}; choose from {sorted(NAMED_MAPS)}")
            if not isinstance(dist, GridDensity):
                raise ValidationError("named numeric maps act on grid densities")
            target = self.opt.get("target")
            if not target:
                raise ParseError("--map needs --target lo:hi:count")
            grid = parse_t_grid(target)
            if grid.size < 2:
                raise ValidationError("--target needs at least two points")
            return NumericMap(NAMED_MAPS[name], (Axis(grid[0], grid[-1], grid.size),), name)
        if self.opt.get("transform"):
            return mio.transform_from_doc(self.read(self.opt["transform"]))
        if self._fixture() == "suspects":
            return fixtures.hats()
        raise ParseError("pushforward needs --transform, --map or --fixture suspects")

    def model(self):
        """Model, interest function and default t grid (fixtures only)."""
        fx = self._fixture()
        if fx is not None:
            if fx not in _MODEL_FIXTURES:
                raise ParseError(f"unknown model fixture {fx!r}; choose from {sorted(_MODEL_FIXTURES)}")
            model, interest, grid = _MODEL_FIXTURES[fx]()
        else:
            doc = self._input()
            model = _model_from_doc(doc)
            interest, grid = Coordinate(0), None
            if "interest" in doc:
                sel = doc["interest"]
                if "coordinate" in sel:
                    interest = Coordinate(sel["coordinate"])
                else:
                    interest = LinearCombination(sel["linear"])
        if self.opt.get("interest"):
            interest = parse_interest(self.opt["interest"], model.dim)
        return model, interest, grid


_MODEL_FIXTURES = {
    "normal": lambda: (fixtures.normal(), Coordinate(0), fixtures.NORMAL_T_GRID),
    "quadratic": lambda: (
        fixtures.quadratic(),
        LinearCombination(fixtures.QUADRATIC_COEFFICIENTS),
        fixtures.QUADRATIC_T_GRID,
    ),
    "logistic": lambda: (fixtures.logistic(), Coordinate(0), fixtures.LOGISTIC_T_GRID),
}


def _model_from_doc(doc):
    mio.validate(doc, "model")
    kind = doc["model"]
    needs = {"normal": ("data",), "quadratic": ("mean", "precision", "box"), "logistic": ("x", "y")}[kind]
    for key in needs:
        if key not in doc:
            raise ParseError(f"{kind} model needs {key!r}")
    if kind == "normal":
        return normal_model(doc["data"], doc.get("box"))
    if kind == "quadratic":
        return quadratic_model(doc["mean"], doc["precision"], doc["box"])
    kw = {"noise": doc["noise"]} if "noise" in doc else {}
    if "box" in doc:
        kw["bounds"] = doc["box"]
    return logistic_model(doc["x"], doc["y"], **kw)


def _with_mode(dist, mode):
    if isinstance(dist, GridDensity):
        return GridDensity(dist.axes, dist.values, mode)
    return dist.with_mode(mode)


def _argmax(dist):
    return dist.argmax()


def _dist_rows(dist):
    if isinstance(dist, GridDensity):
        header = [f"x_{i + 1}" for i in range(dist.ndim)] + ["weight"]
        return header, [list(p) + [w] for p, w in zip(dist.nodes().tolist(), dist.values.ravel().tolist())]
    return ["label", "weight"], [[_label_text(lab), w] for lab, w in zip(dist.labels, dist.weights)]


def _label_text(lab):
    if isinstance(lab, tuple):
        return json.dumps(mio.jsonable(lab))
    return str(lab)


def _comparison(dist, T):
    images = {m: pushforward(_with_mode(dist, m), T) for m in (ADDITIVE, MAXITIVE)}
    arg = {str(m): _argmax(img) for m, img in images.items()}
    return {
        "source": mio.distribution_to_doc(dist),
        "additive": mio.distribution_to_doc(images[ADDITIVE]),
        "maxitive": mio.distribution_to_doc(images[MAXITIVE]),
        "argmax": arg,
        "argmax_flip": arg["additive"] != arg["maxitive"],
    }


def _comparison_rows(doc):
    rows = []
    for mode in ("additive", "maxitive"):
        d = mio.distribution_from_doc(doc[mode])
        _, body = _dist_rows(d)
        rows += [[mode] + r for r in body]
    header = ["mode"] + _dist_rows(mio.distribution_from_doc(doc["additive"]))[0]
    return header, rows


def _cmd_axioms(run):
    dist = run.distribution()
    modes = [ADDITIVE, MAXITIVE] if run.config.mode == "both" else [dist.mode]
    reports = []
    for m in modes:
        d = dist if m is dist.mode else dist.with_mode(m)
        if run.opt.get("normalize"):
            d = normalize(d)
        reports.append(check_axioms(d, trials=run.opt.get("trials") or 1000, seed=run.config.seed).to_dict())
    doc = {"passed": all(r["passed"] for r in reports), "reports": reports}
    rows = [[r["mode"], law["law"], str(law["passed"]).lower(), law["checked"]] for r in reports for law in r["laws"]]
    status = EXIT_OK if doc["passed"] else EXIT_CHECK_FAILED
    return "axioms", doc, (["mode", "law", "passed", "checked"], rows), status


def _cmd_pushforward(run):
    dist = run.distribution()
    T = run.transform(dist)
    if run.config.mode == "both":
        doc = _comparison(dist, T)
        return "comparison", doc, _comparison_rows(doc), EXIT_OK
    image = pushforward(dist, T)
    doc = mio.distribution_to_doc(image)
    return ("grid" if isinstance(image, GridDensity) else "distribution"), doc, _dist_rows(image), EXIT_OK


def _cmd_compare(run):
    if run.config.mode in ("additive", "maxitive"):
        raise ValidationError("compare-modes always runs both semirings; drop --mode")
    dist = run.distribution()
    doc = _comparison(dist, run.transform(dist))
    return "comparison", doc, _comparison_rows(doc), EXIT_OK


def _cmd_suspects(run):
    doc = _comparison(fixtures.suspects(ADDITIVE), fixtures.hats())
    return "comparison", doc, _comparison_rows(doc), EXIT_OK


def _profile_options(run):
    o = run.opt
    kw = {"seed": run.config.seed}
    for name in ("starts", "xtol", "ftol", "ctol", "workers"):
        if o.get(name) is not None:
            kw[name] = o[name]
    if o.get("cold_start") or (o.get("workers") or 1) > 1:
        kw["warm_start"] = False
    return ProfileOptions(**kw)


def _cmd_profile(run):
    model, interest, default_grid = run.model()
    text = run.opt.get("t_grid") or default_grid
    if text is None:
        raise ParseError("profile needs --t-grid lo:hi:count")
    curve = profile(model, interest, parse_t_grid(text), _profile_options(run))
    header, rows = curve.csv_rows()
    doc = {
        "model": model.name,
        "param_names": list(model.param_names),
        "t": curve.t_grid,
        "log_profile": curve.log_values,
        "argmax": curve.argmax_points,
    }
    return "profile", doc, (header, rows), EXIT_OK


def _cmd_distance(run):
    scale = run.opt.get("scale") or 1.0
    fx = run._fixture()
    if fx in _MODEL_FIXTURES:
        source, _, _ = run.model()
    elif fx == "suspects":
        source = fixtures.suspects(MAXITIVE)
    elif fx is None:
        doc = run._input()
        if isinstance(doc, dict) and "model" in doc:
            source = _model_from_doc(doc)
        else:
            source = mio.distribution_from_doc(doc)
    else:
        raise ParseError(f"unknown fixture {fx!r}")
    numeric = not isinstance(source, DiscreteDistribution)
    if run.opt.get("points"):
        points = parse_points(run.opt["points"], numeric)
    elif isinstance(source, DiscreteDistribution):
        points = list(source.labels)
    else:
        raise ParseError("distance on a model or grid needs --points")
    rows = distance_table(source, points, scale=scale)
    doc = {"scale": scale, "rows": rows}
    body = [[_label_text(r["theta_1"]), _label_text(r["theta_2"]), r["relation"], r["distance"]] for r in rows]
    return "distances", doc, (["theta_1", "theta_2", "relation", "distance"], body), EXIT_OK


def _cost_rows(cm):
    return ["label", "cost"], [[_label_text(lab), c] for lab, c in zip(cm.labels, cm.costs)]


def _cmd_bayes(run):
    if run._fixture() == "suspects":
        evidence = [from_weights(normalize(fixtures.suspects(MAXITIVE)))]
        prior = CostMeasure.flat(evidence[0].labels)
    else:
        prior = mio.costs_from_doc(run._input())
        paths = run.opt.get("evidence") or []
        if not paths:
            raise ParseError("tropical-bayes needs at least one --evidence")
        evidence = [mio.costs_from_doc(run.read(p)) for p in paths]
    post = prior
    for ev in evidence:
        post = tropical_bayes(post, ev)
    return "costs", mio.costs_to_doc(post), _cost_rows(post), EXIT_OK


def _cmd_bellman(run):
    if run._fixture() == "bellman":
        M, v = fixtures.bellman_graph()
    else:
        M = mio.matrix_from_doc(run._input())
        if not run.opt.get("vector"):
            raise ParseError("bellman needs --vector with the initial costs")
        v = mio.costs_from_doc(run.read(run.opt["vector"]))
        if M.labels is not None and set(v.labels) == set(M.labels):
            v = CostMeasure(M.labels, tuple(v[lab] for lab in M.labels))
    steps = run.opt.get("steps")
    out, taken = bellman_iterate(M, v, steps=steps)
    return "costs", mio.costs_to_doc(out, steps=taken), _cost_rows(out), EXIT_OK


_HANDLERS = {
    "axioms": _cmd_axioms,
    "pushforward": _cmd_pushforward,
    "profile": _cmd_profile,
    "compare-modes": _cmd_compare,
    "distance": _cmd_distance,
    "tropical-bayes": _cmd_bayes,
    "bellman": _cmd_bellman,
    "suspects-demo": _cmd_suspects,
}

_DEFAULT_FORMAT = {"profile": "csv", "distance": "csv"}


def _manifest(run, outputs):
    opts = {k: v for k, v in sorted(run.opt.items()) if v is not None}
    return {
        "subcommand": run.config.subcommand,
        "inputs": run.hashes,
        "seed": run.config.seed,
        "options": {"mode": run.config.mode, "format": run.config.fmt, **opts},
        "outputs": outputs,
        "versions": {
            "maxitive": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }


def run(config, stdout=None):
    """Execute one subcommand; returns the exit status.

    Writes the result to ``config.output`` (plus ``run_manifest.json`` beside
    it) or to ``stdout`` when no output path is given.
    """
    stdout = stdout or sys.stdout
    r = _Run(config)
    kind, doc, (header, rows), status = _HANDLERS[config.subcommand](r)
    fmt = config.fmt or _DEFAULT_FORMAT.get(config.subcommand, "json")
    if fmt == "json":
        mio.validate(mio.jsonable(doc), kind)
        text = mio.dumps(doc)
    else:
        text = mio.csv_text(header, rows)
    if config.output:
        out_dir = os.path.dirname(os.path.abspath(config.output))
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        manifest = _manifest(r, [os.path.basename(config.output)])
        mio.validate(mio.jsonable(manifest), "manifest")
        with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
            fh.write(mio.dumps(manifest))
    else:
        stdout.write(text)
    return status


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], metavar="PATH", help="input JSON document")
    common.add_argument("--output", metavar="PATH", help="result file; run_manifest.json is written beside it")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("csv", "json"))
    common.add_argument("--mode", choices=("additive", "maxitive", "both"))
    common.add_argument("--fixture", help="built-in fixture instead of --input")

    prof = argparse.ArgumentParser(add_help=False)
    prof.add_argument("--t-grid", dest="t_grid", metavar="LO:HI:COUNT")
    prof.add_argument("--interest", metavar="coordinate:I|linear:C1,C2,...")
    prof.add_argument("--starts", type=int)
    prof.add_argument("--xtol", type=float)
    prof.add_argument("--ftol", type=float)
    prof.add_argument("--ctol", type=float)
    prof.add_argument("--workers", type=int, help="threads for cold-start parallel profiling")
    prof.add_argument("--cold-start", dest="cold_start", action="store_true")

    trans = argparse.ArgumentParser(add_help=False)
    trans.add_argument("--transform", metavar="PATH", help='{"relabel": {...}} or {"project": [...]}')
    trans.add_argument("--map", choices=sorted(NAMED_MAPS), help="built-in numeric map for grids")
    trans.add_argument("--target", metavar="LO:HI:COUNT", help="target grid of --map")

    parser = argparse.ArgumentParser(
        prog="maxitive",
        description="Max-product and sum-product measures, pushforwards, profiles and tropical updates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    p = sub.add_parser("axioms", parents=[common], help="check possibility/probability axioms")
    p.add_argument("--trials", type=int)
    p.add_argument("--normalize", action="store_true")
    sub.add_parser("pushforward", parents=[common, trans], help="push a distribution through a map")
    sub.add_parser("compare-modes", parents=[common, trans], help="pushforward under both semirings")
    sub.add_parser("profile", parents=[common, prof], help="profile likelihood curve")
    p = sub.add_parser("distance", parents=[common, prof], help="pairwise likelihood distances")
    p.add_argument("--points", help="';'-separated labels or comma-separated coordinates")
    p.add_argument("--scale", type=float, help="reporting multiplier for distances")
    p = sub.add_parser("tropical-bayes", parents=[common], help="min-plus Bayes update of cost measures")
    p.add_argument("--evidence", action="append", metavar="PATH")
    p = sub.add_parser("bellman", parents=[common], help="Bellman chain value iteration")
    p.add_argument("--vector", metavar="PATH", help="initial cost vector JSON")
    p.add_argument("--steps", type=int, help="fixed number of steps (default: to fixed point)")
    sub.add_parser("suspects-demo", parents=[common], help="three suspects / hat colour example")
    return parser


_BASE_KEYS = {"subcommand", "input", "output", "seed", "fmt", "mode"}


def config_from_args(ns):
    options = {k: v for k, v in vars(ns).items() if k not in _BASE_KEYS}
    return RunConfig(
        subcommand=ns.subcommand,
        inputs=list(ns.input),
        output=ns.output,
        seed=ns.seed,
        fmt=ns.fmt,
        mode=ns.mode,
        options=options,
    )


def _fail(exc, code, category):
    record = {"error": type(exc).__name__, "category": category, "exit_code": code, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        record["diagnostics"] = mio.jsonable(diag)
    sys.stderr.write(f"maxitive: {category} error: {exc}\n")
    sys.stderr.write(json.dumps(record, allow_nan=False) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except ParseError as exc:
        return _fail(exc, EXIT_PARSE, "parse")
    except OptimizerFailure as exc:
        return _fail(exc, EXIT_OPTIMIZER, "optimizer")
    except (ValidationError, MaxitiveError) as exc:
        return _fail(exc, EXIT_VALIDATION, "validation")
    except OSError as exc:
        return _fail(exc, EXIT_IO, "io")


if __name__ == "__main__":
    sys.exit(main())
