"""Command-line entry point: simulate, fit, evaluate, select and export-maps."""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

from typing_extensions import override

from src.config import RunConfig, build_config, read_config_file
from src.errors import ConvergenceError, DataError, UsageError
from src.evaluation import (
    ENET_PCA,
    SPCA_TV,
    Method,
    default_methods,
    evaluate_datasets,
    evaluate_folds,
    paired_report,
    select_weights,
    summarize,
    weight_grid,
)
from src.models import PenaltyWeights, TriangleMesh
from src.parser import Parser, ParserGrid, ParserMask, ParserMesh, Structure
from src.spca import fit, penalty_scale
from src.storage import (
    LoadedData,
    read_dataset,
    read_model,
    write_dataset,
    write_model,
    write_operator_csv,
    write_table,
)
from src.structure import GroupLinearOperator
from src.synthdata import generate_dataset
from src.visualizer import LoadingMapBuilder

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONVERGENCE = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
DATASET_PREFIX = "dataset_"
OPERATOR_FILE = "operator.csv"


class _ArgumentParser(argparse.ArgumentParser):
    @override
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key=value file; flags override it")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--data", type=Path)
    structure = parser.add_mutually_exclusive_group()
    structure.add_argument("--mask", type=Path, help="GRID mask file")
    structure.add_argument("--mesh", type=Path, help="OFF-like triangle mesh file")
    structure.add_argument("--grid", help="full grid, e.g. 50x50")
    parser.add_argument("--model", type=Path)
    parser.add_argument("--out", type=Path)
    parser.add_argument("--k", type=int)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--global-weight", type=float)
    parser.add_argument("--l1-ratio", type=float)
    parser.add_argument("--tv-ratio", type=float)
    parser.add_argument("--folds", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--n", type=int, help="samples per simulated dataset")
    parser.add_argument("--side", type=int, help="image side of simulated datasets")
    parser.add_argument("--snr", type=float)
    parser.add_argument("--datasets", type=int, help="number of simulated datasets")
    parser.add_argument(
        "--select",
        action="store_const",
        const=True,
        help="grid-search weights on the first dataset before evaluating",
    )
    parser.add_argument(
        "--export-operator",
        action="store_const",
        const=True,
        help="also write the TV operator as (row, col, value) triplets",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="spca-tv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, help_text in (
        ("simulate", "write synthetic dot-image datasets"),
        ("fit", "fit an SPCA-TV model and write loadings and solver traces"),
        ("evaluate", "K-fold or multi-dataset comparison of SPCA-TV and ElasticNet-PCA"),
        ("select", "grid-search penalty weights on one train/test split"),
        ("export-maps", "write loading maps of a fitted model"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config is not None else {}
    overrides: dict[str, Any] = {
        k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")
    }
    return build_config(file_values, overrides)


def _parser_for(description: str) -> Parser:
    kind, _, value = description.partition(" ")
    match kind:
        case "grid":
            return ParserGrid.from_string(value)
        case "mask":
            return ParserMask(Path(value))
        case "mesh":
            return ParserMesh(Path(value))
        case _:
            raise UsageError(f"unknown structure reference {description!r}")


def structure_description(config: RunConfig, fallback: str | None = None) -> str:
    """``grid WxH``, ``mask <path>`` or ``mesh <path>``; flags win over stored metadata."""
    if config.mask is not None:
        return f"mask {config.mask}"
    if config.mesh is not None:
        return f"mesh {config.mesh}"
    if config.grid is not None:
        return f"grid {config.grid}"
    if fallback is not None:
        return fallback
    raise UsageError("no structure: give --mask, --mesh or --grid")


def _structure_size(structure: Structure) -> int:
    return structure.n_vertices if isinstance(structure, TriangleMesh) else structure.p


def load_structure(description: str, p: int) -> Structure:
    structure = _parser_for(description).parse()
    size = _structure_size(structure)
    if size != p:
        raise DataError(f"structure {description!r} has {size} features, data has {p}")
    return structure


def load_operator(description: str, p: int) -> GroupLinearOperator:
    op = _parser_for(description).operator()
    if op.p != p:
        raise DataError(f"structure {description!r} has {op.p} features, data has {p}")
    return op


def _require(value: Path | None, flag: str) -> Path:
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def cmd_simulate(config: RunConfig) -> int:
    for index in range(config.datasets):
        seed = config.seed + index
        dataset = generate_dataset(seed, config.n, config.side, config.snr)
        write_dataset(config.out / f"{DATASET_PREFIX}{index + 1:03d}", dataset)
    return EXIT_OK


def cmd_fit(config: RunConfig) -> int:
    data = read_dataset(_require(config.data, "--data"))
    description = structure_description(config, data.structure)
    op = load_operator(description, data.X.shape[1])
    model = fit(data.X, config.k, config.weights(), op, config.eps, config.seed)
    write_model(config.out, model, description)
    if config.export_operator:
        write_operator_csv(config.out / OPERATOR_FILE, op)
    return EXIT_OK


def _load_datasets(path: Path) -> list[LoadedData]:
    if path.is_dir():
        members = sorted(p for p in path.iterdir() if p.name.startswith(DATASET_PREFIX))
        if members:
            return [read_dataset(p) for p in members]
    return [read_dataset(path)]


def _tuned_methods(
    config: RunConfig, first: LoadedData, op: GroupLinearOperator
) -> list[Method]:
    """Weights chosen per method on the first dataset's train/test split."""
    half = first.X.shape[0] // 2
    train, test = first.X[:half], first.X[half:]
    methods: list[Method] = []
    for name, with_tv in ((SPCA_TV, True), (ENET_PCA, False)):
        best, table = select_weights(
            train,
            test,
            op,
            config.k,
            config.eps,
            config.seed,
            weight_grid(with_tv, penalty_scale(train)),
            config.workers,
        )
        write_table(config.out / f"selection_{name}.csv", table)
        logger.info("%s: selected weights %s", name, best)
        methods.append(Method(name, best))
    return methods


def cmd_evaluate(config: RunConfig) -> int:
    datasets = _load_datasets(_require(config.data, "--data"))
    p = datasets[0].X.shape[1]
    if any(d.X.shape[1] != p for d in datasets):
        raise DataError("datasets disagree on the number of features")
    description = structure_description(config, datasets[0].structure)
    op = load_operator(description, p)

    if config.select:
        methods = _tuned_methods(config, datasets[0], op)
    else:
        methods = default_methods(config.weights())

    if len(datasets) > 1:
        report = evaluate_datasets(
            datasets, methods, op, config.k, config.eps, config.seed, config.workers
        )
    else:
        report = evaluate_folds(
            datasets[0], methods, op, config.k, config.eps, config.seed, config.folds, config.workers
        )

    write_table(config.out / "report.csv", report)
    write_table(config.out / "paired.csv", paired_report(report))
    write_table(config.out / "summary.csv", summarize(report))
    return EXIT_OK


def cmd_select(config: RunConfig) -> int:
    data = read_dataset(_require(config.data, "--data"))
    description = structure_description(config, data.structure)
    op = load_operator(description, data.X.shape[1])
    half = data.X.shape[0] // 2
    best, table = select_weights(
        data.X[:half],
        data.X[half:],
        op,
        config.k,
        config.eps,
        config.seed,
        weight_grid(with_tv=config.tv_ratio > 0, scale=penalty_scale(data.X[:half])),
        config.workers,
    )
    write_table(config.out / "selection.csv", table)
    _write_selected(config.out / "selected.conf", best)
    return EXIT_OK


def _write_selected(path: Path, weights: PenaltyWeights) -> None:
    global_weight, l1_ratio, tv_ratio = weights.ratios()
    _ = path.write_text(
        f"global_weight = {global_weight!r}\nl1_ratio = {l1_ratio!r}\ntv_ratio = {tv_ratio!r}\n"
    )
    logger.info("selected weights written to %s", path)


def cmd_export_maps(config: RunConfig) -> int:
    model_dir = _require(config.model, "--model")
    model, meta = read_model(model_dir)
    description = structure_description(config, meta.get("structure"))
    structure = load_structure(description, model.n_features)
    _ = LoadingMapBuilder(model, structure).build(config.out)
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "select": cmd_select,
    "export-maps": cmd_export_maps,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = _config_from_args(args)
        return COMMANDS[args.command](config)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as e:
        print(f"convergence failure: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DataError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
