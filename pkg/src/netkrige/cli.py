"""``netkrige`` command-line interface.

Every subcommand accepts ``--config file.json``; keys are the long flag
names with dashes replaced by underscores, and flags given on the command
line win over the file.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import platform
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__
from . import io as nio
from .evaluation import (
    default_thresholds,
    full_measurement,
    random_link_model,
    relative_error_curve,
    roc_sweep,
    simulate_series,
    spike_schedule,
)
from .kriging import (
    LinkModel,
    average_summary,
    bias_correct,
    build_eblp,
    build_truncated_predictor,
    group_difference_summary,
    reconstruct_paths,
)
from .selection import (
    SelectionError,
    SelectionResult,
    check_sampling_bound,
    check_selection_bound,
    compute_fk_curve,
    select_paths_deterministic,
    select_paths_randomized,
)
from .spectral import (
    SpectralError,
    betweenness_report,
    check_betweenness_bound,
    compute_spectrum,
    effective_rank,
    max_gap_index,
)
from .topology import (
    BUNDLED_FIXTURES,
    DimensionError,
    RoutingMatrix,
    TopologyError,
    build_routing_matrix,
    bundled_topology,
    load_topology,
    read_routing_matrix,
    write_routing_matrix,
)

log = logging.getLogger("netkrige")

EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_NUMERIC = 4
EXIT_PRECONDITION = 5


class PreconditionError(ValueError):
    pass


# --- shared loaders ------------------------------------------------------------


def _topology(ref):
    if os.path.exists(ref):
        return load_topology(ref)
    if ref in BUNDLED_FIXTURES:
        return bundled_topology(ref)
    raise nio.FormatError(f"topology {ref!r} is neither a file nor a bundled fixture")


def _matrix(path) -> RoutingMatrix:
    if not os.path.exists(path):
        raise nio.FormatError(f"routing matrix file {path} not found")
    return read_routing_matrix(path)


def _sigma(path, n_links):
    if path is None:
        return np.eye(n_links)
    return nio.read_sigma(path, n_links)


def _summary(choice, n_paths):
    if choice in (None, "avg"):
        return average_summary(n_paths)
    kind, _, arg = choice.partition(":")
    if kind == "diff":
        a, _, b = arg.partition(",")
        return group_difference_summary(n_paths, nio.read_path_list(a), nio.read_path_list(b))
    if kind == "file":
        return nio.read_summary_file(arg, n_paths)
    raise nio.FormatError(f"unknown summary choice {choice!r}; use avg, diff:A,B or file:PATH")


def _parse_sweep(text):
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise nio.FormatError(f"sweep must look like lo:hi:step, got {text!r}") from exc
    return default_thresholds(lo, hi, step)


def _parse_spike(text):
    try:
        epoch, link, delta = text.split(":")
        return int(epoch), int(link), float(delta)
    except ValueError as exc:
        raise nio.FormatError(f"spike must look like epoch:link:delta, got {text!r}") from exc


def _measured(G, path):
    epochs, ids, values = nio.read_measurements(path)
    if max(ids, default=-1) >= G.n_paths:
        raise DimensionError(f"{path}: path id {max(ids)} exceeds n_p={G.n_paths}")
    return epochs, ids, values


def _columns_for(ids, wanted, path):
    pos = {p: i for i, p in enumerate(ids)}
    missing = [p for p in wanted if p not in pos]
    if missing:
        raise DimensionError(f"{path}: no measurements for selected paths {missing}")
    return [pos[p] for p in wanted]


def _emit(doc, out):
    if out:
        nio.write_json(out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


# --- subcommands -----------------------------------------------------------------


def cmd_build(args):
    topo = _topology(args.topology)
    weights = None
    if args.weights:
        weights = nio.read_link_vector(args.weights, topo.n_links)
    G = build_routing_matrix(topo, weights)
    write_routing_matrix(G, args.out, topo.labels)
    log.info("wrote %d x %d routing matrix to %s", G.n_paths, G.n_links, args.out)


def cmd_spectrum(args):
    G = _matrix(args.matrix)
    C = None
    if args.sigma:
        C = LinkModel(np.zeros(G.n_links), _sigma(args.sigma, G.n_links)).scaling()
    spec = compute_spectrum(G, C)
    nio.write_csv(
        args.out,
        ["k", "eigenvalue", "eigenvalue_ratio"],
        ((k + 1, lam, r) for k, (lam, r) in enumerate(zip(spec.eigenvalues, spec.ratios))),
    )
    if args.eigvecs:
        os.makedirs(args.eigvecs, exist_ok=True)
        width = len(str(spec.eigenvalues.size))
        for k in range(spec.eigenvalues.size):
            nio.write_csv(
                os.path.join(args.eigvecs, f"eigvec_{k + 1:0{width}d}.csv"),
                ["link", "magnitude"],
                ((j, abs(v)) for j, v in enumerate(spec.eigenvectors[:, k])),
            )
    print(f"rank {spec.numeric_rank}; largest gap after k={max_gap_index(spec)}; "
          f"effective rank at {args.threshold}: {effective_rank(spec, args.threshold)}")


def cmd_select(args):
    G = _matrix(args.matrix)
    sigma = _sigma(args.sigma, G.n_links)
    if args.method in ("det", "deterministic"):
        if args.k is None:
            raise PreconditionError("--k is required for deterministic selection")
        sel = select_paths_deterministic(G, sigma, args.k)
    else:
        C = LinkModel(np.zeros(G.n_links), sigma).scaling()
        sel = select_paths_randomized(G, C, args.c or args.k, args.seed)
    _emit(sel.to_dict(), args.out)


def cmd_fk(args):
    G = _matrix(args.matrix)
    sigma = _sigma(args.sigma, G.n_links)
    _check_k_range(G, sigma, args.kmax)
    nio.write_csv(args.out, ["k", "fk"], compute_fk_curve(G, sigma, args.kmax, weighted=args.weighted))


def _check_k_range(G, sigma, kmax, kmin=1):
    rank = G.rank()
    if not 1 <= kmin <= kmax <= rank:
        raise PreconditionError(f"k range {kmin}..{kmax} must lie within 1..rank(G)={rank}")


def _predictor(G, sigma, sel: SelectionResult, l, k=None):
    model = LinkModel(np.zeros(G.n_links), sigma)
    if sel.method == "randomized":
        return build_truncated_predictor(G, model, sel.indices, sel.scaling, l, k or sel.achieved_rank, selection=sel)
    return build_eblp(G, model, sel.indices, l, selection=sel)


def cmd_predict(args):
    G = _matrix(args.matrix)
    sigma = _sigma(args.sigma, G.n_links)
    sel = SelectionResult.from_dict(nio.read_json(args.selection))
    l = _summary(args.summary, G.n_paths)
    epochs, ids, values = _measured(G, args.measurements)
    pred = _predictor(G, sigma, sel, l, args.k)
    cols = _columns_for(ids, [int(i) for i in pred.indices], args.measurements)
    if args.bias_correct_epoch is not None:
        t0 = args.bias_correct_epoch
        if not 0 <= t0 < len(epochs):
            raise PreconditionError(f"bias-correction epoch {t0} outside the series")
        if sorted(ids) == list(range(G.n_paths)):
            full = values[t0][np.argsort(ids)]
        else:
            full = reconstruct_paths(G, ids, values[t0])
        pred = bias_correct(pred, G, l, full)
    out = pred.predict(values[:, cols])
    nio.write_csv(args.out, ["epoch", "prediction"], zip(epochs, out))


def cmd_summary(args):
    G = _matrix(args.matrix)
    l = _summary(args.summary, G.n_paths)
    epochs, ids, values = _measured(G, args.measurements)
    if sorted(ids) != list(range(G.n_paths)):
        raise DimensionError("summarizing needs measurements of every path")
    nio.write_csv(args.out, ["epoch", "value"], zip(epochs, values[:, np.argsort(ids)] @ l))


def cmd_simulate(args):
    G = _matrix(args.matrix)
    if args.mu:
        model = LinkModel(nio.read_link_vector(args.mu, G.n_links), _sigma(args.sigma, G.n_links))
    else:
        model = random_link_model(G.n_links, args.seed)
    spikes = [_parse_spike(s) for s in args.spike or []]
    series = simulate_series(G, model, args.epochs, args.seed, spikes)
    nio.write_measurements(args.out, series.values)
    if args.links_out:
        nio.write_csv(args.links_out, ["epoch"] + [str(j) for j in range(G.n_links)],
                      ([t, *row] for t, row in enumerate(series.link_truth)))


def cmd_evaluate(args):
    G = _matrix(args.matrix)
    sigma = _sigma(args.sigma, G.n_links)
    _check_k_range(G, sigma, args.kmax, args.kmin)
    epochs, ids, values = _measured(G, args.measurements)
    if sorted(ids) != list(range(G.n_paths)):
        raise DimensionError("evaluation needs measurements of every path")
    from .evaluation import EpochSeries

    series = EpochSeries(values[:, np.argsort(ids)])
    l = _summary(args.summary, G.n_paths)
    model = LinkModel(np.zeros(G.n_links), sigma)
    curve = relative_error_curve(series, G, model, l, range(args.kmin, args.kmax + 1))
    nio.write_csv(args.out, ["k", "mean_relative_error"], curve)


def cmd_anomaly(args):
    t_epochs, truth = nio.read_series(args.true)
    p_epochs, pred = nio.read_series(args.pred)
    if truth.size != pred.size or np.any(t_epochs != p_epochs):
        raise DimensionError("true and predicted series cover different epochs")
    roc = roc_sweep(truth, pred, args.window, args.truth_mult, _parse_sweep(args.sweep))
    nio.write_csv(args.out, ["threshold", "tpr", "fpr"], ((p.threshold, p.tpr, p.fpr) for p in roc.points))


def cmd_check_bounds(args):
    G = _matrix(args.matrix)
    sigma = _sigma(args.sigma, G.n_links)
    mu = nio.read_link_vector(args.mu, G.n_links) if args.mu else np.ones(G.n_links)
    l = _summary(args.summary, G.n_paths)
    report = {}

    spec = compute_spectrum(G)
    if args.topology:
        rep = betweenness_report(G, _topology(args.topology))
    else:
        # longest routed path stands in for the diameter when no topology is given
        from .spectral import BetweennessReport

        B = np.rint(G.entries.T @ G.entries).astype(int)
        rep = BetweennessReport(np.diag(B).copy(), B, int(G.hop_counts.max()))
    rows = check_betweenness_bound(spec, rep)
    report["betweenness_bound"] = {
        "diameter": rep.diameter,
        "violations": sum(not (r.satisfied and r.ratio_satisfied) for r in rows),
        "rows": [asdict(r) for r in rows],
    }

    kmax = args.kmax or G.rank()
    _check_k_range(G, sigma, kmax)
    sel_rows = [check_selection_bound(G, sigma, mu, l, k) for k in range(1, kmax + 1)]
    report["selection_bound"] = {
        "violations": sum(not r.satisfied for r in sel_rows),
        "rows": [asdict(r) for r in sel_rows],
    }

    if args.c:
        res = check_sampling_bound(G, sigma, mu, l, args.c, args.k or 1, args.delta, args.trials, args.seed)
        report["sampling_bound"] = dict(asdict(res), satisfied=res.satisfied, c=args.c, k=args.k or 1, delta=args.delta)
    _emit(report, args.out)
    bad = report["betweenness_bound"]["violations"] + report["selection_bound"]["violations"]
    if "sampling_bound" in report and not report["sampling_bound"]["satisfied"]:
        bad += 1
    return 1 if bad else 0


# --- pipeline --------------------------------------------------------------------


@dataclass
class RunConfig:
    topology: str = "line3"
    mu: Optional[str] = None
    sigma: Optional[str] = None
    measurements: Optional[str] = None
    k: int = 2
    kmin: int = 1
    kmax: Optional[int] = None
    method: str = "det"
    c: Optional[int] = None
    seed: int = 0
    summary: str = "avg"
    epochs: int = 432
    spikes: int = 0
    window: int = 6
    truth_mult: float = 3.0
    sweep: str = "1:5:0.25"
    bias_correct_epoch: Optional[int] = None
    out: str = "netkrige-out"

    @classmethod
    def from_dict(cls, doc):
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise nio.FormatError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def validate(self):
        for name in ("mu", "sigma", "measurements"):
            path = getattr(self, name)
            if path is not None and not os.path.exists(path):
                raise nio.FormatError(f"config {name}: file {path} not found")
        if self.method not in ("det", "deterministic", "rand", "randomized"):
            raise nio.FormatError(f"unknown method {self.method!r}")


def run_pipeline(cfg: RunConfig) -> dict:
    """Build, analyze, select, predict and evaluate; returns the manifest."""
    cfg.validate()
    topo = _topology(cfg.topology)
    G = build_routing_matrix(topo)
    # parse every input before computing anything
    if cfg.mu:
        model = LinkModel(nio.read_link_vector(cfg.mu, G.n_links), _sigma(cfg.sigma, G.n_links))
    elif cfg.sigma:
        model = LinkModel(np.zeros(G.n_links), _sigma(cfg.sigma, G.n_links))
    else:
        model = random_link_model(G.n_links, cfg.seed)
    l = _summary(cfg.summary, G.n_paths)
    measured = nio.read_measurements(cfg.measurements) if cfg.measurements else None

    rank = G.rank()
    kmax = cfg.kmax or rank
    if not 1 <= cfg.kmin <= kmax <= rank:
        raise PreconditionError(f"k range {cfg.kmin}..{kmax} must lie within 1..rank(G)={rank}")
    if not 1 <= cfg.k <= rank:
        raise PreconditionError(f"k={cfg.k} must lie within 1..rank(G)={rank}")

    os.makedirs(cfg.out, exist_ok=True)
    out = lambda name: os.path.join(cfg.out, name)  # noqa: E731
    outputs = []

    write_routing_matrix(G, out("G.txt"), topo.labels)
    outputs += ["G.txt", "G.paths.json"]
    nio.write_link_vector(out("mu.csv"), model.mu, "mean")
    nio.write_link_vector(out("sigma.csv"), np.diag(model.sigma), "variance")
    outputs += ["mu.csv", "sigma.csv"]

    spec = compute_spectrum(G)
    nio.write_csv(out("spectrum.csv"), ["k", "eigenvalue", "eigenvalue_ratio"],
                  ((k + 1, a, b) for k, (a, b) in enumerate(zip(spec.eigenvalues, spec.ratios))))
    outputs.append("spectrum.csv")

    if cfg.method in ("det", "deterministic"):
        sel = select_paths_deterministic(G, model.sigma, cfg.k)
    else:
        sel = select_paths_randomized(G, model.scaling(), cfg.c or cfg.k, cfg.seed)
    nio.write_json(out("selection.json"), sel.to_dict())
    outputs.append("selection.json")

    nio.write_csv(out("fk.csv"), ["k", "fk"], compute_fk_curve(G, model.sigma, kmax))
    outputs.append("fk.csv")

    if measured is not None:
        _, ids, values = measured
        if sorted(ids) != list(range(G.n_paths)):
            raise DimensionError("pipeline measurements must cover every path")
        y = values[:, np.argsort(ids)]
    else:
        spikes = spike_schedule(G, model, l, cfg.spikes, cfg.epochs, cfg.seed) if cfg.spikes else []
        y = simulate_series(G, model, cfg.epochs, cfg.seed, spikes).values
        nio.write_measurements(out("measurements.csv"), y)
        outputs.append("measurements.csv")

    from .evaluation import EpochSeries

    series = EpochSeries(y)
    pred = _predictor(G, model.sigma, sel, l, cfg.k)
    if cfg.bias_correct_epoch is not None:
        pred = bias_correct(pred, G, l, full_measurement(G, model, y[cfg.bias_correct_epoch]))
    predicted = pred.predict_from_paths(y)
    truth = series.summary(l)
    nio.write_csv(out("truth.csv"), ["epoch", "value"], enumerate(truth))
    nio.write_csv(out("prediction.csv"), ["epoch", "prediction"], enumerate(predicted))
    outputs += ["truth.csv", "prediction.csv"]

    curve = relative_error_curve(series, G, model, l, range(cfg.kmin, kmax + 1))
    nio.write_csv(out("relerr.csv"), ["k", "mean_relative_error"], curve)
    outputs.append("relerr.csv")

    if y.shape[0] > cfg.window:
        roc = roc_sweep(truth, predicted, cfg.window, cfg.truth_mult, _parse_sweep(cfg.sweep))
        nio.write_csv(out("roc.csv"), ["threshold", "tpr", "fpr"], ((p.threshold, p.tpr, p.fpr) for p in roc.points))
        outputs.append("roc.csv")

    manifest = {
        "netkrige_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "seed": cfg.seed,
        "parameters": asdict(cfg),
        "outputs": {name: nio.sha256_file(out(name)) for name in outputs},
    }
    nio.write_json(out("manifest.json"), manifest)
    return manifest


def cmd_run(args):
    doc = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    manifest = run_pipeline(RunConfig.from_dict(doc))
    print(f"wrote {len(manifest['outputs'])} artifacts to {doc.get('out', RunConfig.out)}")


# --- argument parsing ------------------------------------------------------------


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file of default flag values")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netkrige", description="Predict network-wide path metrics from a few measured paths.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("build", cmd_build, "build the routing matrix of a topology")
    p.add_argument("--topology", required=True, help="topology JSON file or bundled name")
    p.add_argument("--weights", help="link,weight CSV overriding the topology's weights")
    p.add_argument("--out", required=True, help="triplet output file (sidecar written alongside)")

    p = add("spectrum", cmd_spectrum, "eigenvalues of G^T G (or (GC)^T (GC) with --sigma)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")
    p.add_argument("--threshold", type=float, default=0.2, help="effective-rank ratio threshold")
    p.add_argument("--out", required=True)
    p.add_argument("--eigvecs", help="directory for per-k eigenvector magnitude CSVs")

    p = add("select", cmd_select, "choose paths to measure")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=["det", "rand", "deterministic", "randomized"], default="det")
    p.add_argument("--c", type=int, help="number of draws for randomized selection")
    p.add_argument("--out")

    p = add("fk", cmd_fk, "Gram-deviation curve of the deterministic selection")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--weighted", action="store_true", help="measure the deviation on G C instead of G")
    p.add_argument("--out", required=True)

    p = add("predict", cmd_predict, "predict a path summary per epoch")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")
    p.add_argument("--selection", required=True)
    p.add_argument("--summary", default="avg", help="avg | diff:groupA.txt,groupB.txt | file:l.csv")
    p.add_argument("--measurements", required=True)
    p.add_argument("--bias-correct-epoch", type=int)
    p.add_argument("--k", type=int, help="rank used with a randomized selection")
    p.add_argument("--out", required=True)

    p = add("summary", cmd_summary, "true summary series of fully measured epochs")
    p.add_argument("--matrix", required=True)
    p.add_argument("--summary", default="avg")
    p.add_argument("--measurements", required=True)
    p.add_argument("--out", required=True)

    p = add("simulate", cmd_simulate, "simulate path measurements")
    p.add_argument("--matrix", required=True)
    p.add_argument("--mu")
    p.add_argument("--sigma")
    p.add_argument("--epochs", type=int, default=432)
    p.add_argument("--spike", action="append", help="epoch:link:delta (repeatable)")
    p.add_argument("--links-out", help="also write the simulated link values")
    p.add_argument("--out", required=True)

    p = add("evaluate", cmd_evaluate, "mean relative error against k")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")
    p.add_argument("--measurements", required=True)
    p.add_argument("--summary", default="avg")
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("anomaly", cmd_anomaly, "ROC sweep of spike detection on a predicted series")
    p.add_argument("--true", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--window", type=int, default=6)
    p.add_argument("--truth-mult", type=float, default=3.0)
    p.add_argument("--sweep", default="1:5:0.25")
    p.add_argument("--out", required=True)

    p = add("check-bounds", cmd_check_bounds, "check the betweenness, selection and sampling bounds")
    p.add_argument("--matrix", required=True)
    p.add_argument("--topology", help="topology (for the hop diameter)")
    p.add_argument("--sigma")
    p.add_argument("--mu")
    p.add_argument("--summary", default="avg")
    p.add_argument("--kmax", type=int)
    p.add_argument("--c", type=int, help="draws per trial for the sampling bound")
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out")

    p = add("run", cmd_run, "run the whole pipeline and write a manifest")
    for name, typ in (("topology", str), ("mu", str), ("sigma", str), ("measurements", str),
                      ("k", int), ("kmin", int), ("kmax", int), ("c", int), ("summary", str),
                      ("epochs", int), ("spikes", int), ("window", int), ("truth-mult", float),
                      ("sweep", str), ("bias-correct-epoch", int), ("out", str)):
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--method", choices=["det", "rand", "deterministic", "randomized"], default=None)
    return parser


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv=None):
    """Parse ``argv``; values from ``--config`` become defaults (flags still win)."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    choices = parser._subparsers._group_actions[0].choices
    command = next((tok for tok in argv if tok in choices), None)
    path = _config_path(argv)
    if command and path:
        try:
            cfg = nio.read_json(path)
        except nio.FormatError as exc:
            parser.exit(EXIT_PARSE, f"netkrige: {exc}\n")
        if not isinstance(cfg, dict):
            parser.exit(EXIT_PARSE, "netkrige: config must be a JSON object\n")
        sub = choices[command]
        dests = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - dests)
        if unknown:
            parser.exit(EXIT_PARSE, f"netkrige: unknown config keys {unknown}\n")
        for action in sub._actions:
            if action.dest in cfg:
                action.required = False
        sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (nio.FormatError, TopologyError, json.JSONDecodeError, OSError)):
        return EXIT_PARSE
    if isinstance(exc, DimensionError):
        return EXIT_DIMENSION
    if isinstance(exc, (np.linalg.LinAlgError, SpectralError, ArithmeticError)):
        return EXIT_NUMERIC
    if isinstance(exc, (SelectionError, PreconditionError, ValueError, IndexError)):
        return EXIT_PRECONDITION
    raise exc


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args) or 0
    except Exception as exc:  # mapped to documented exit codes, anything else re-raised
        code = exit_code(exc)
        print(f"netkrige: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
