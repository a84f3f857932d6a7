import argparse
import asyncio
import csv
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from models.exceptions import HetNetError, InsufficientSamples, InvalidInput, SearchFailed, UnsupportedForm, \
    UnsupportedRegime
from models.extended_real import ExtReal
from models.report import IndexEstimate, IndexReport, VerificationReport, VerificationRow, round_sig
from networks import b2b2, b3b3
from simulation.estimator import estimate_sigma_mc
from utils.config import RunConfig, load_run_config, load_settings, parse_cli_options, worker_count
from utils.database import ResultsDatabase
from utils.logger import setup_logger

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNSUPPORTED = 2
EXIT_FAILED = 3

COMMANDS = ("analyze", "verify", "sweep", "witness", "status")


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (UnsupportedRegime, UnsupportedForm)):
        return EXIT_UNSUPPORTED
    if isinstance(error, SearchFailed):
        return EXIT_FAILED
    return EXIT_INVALID


def format_table(report: IndexReport) -> str:
    """Aligned plain-text view of an index report"""
    cycles = sorted({cycle for record in report.records for cycle in record.c_index})
    header = ["connection"] + [f"c[{cycle}]" for cycle in cycles] + ["n", "source"]
    rows = []
    for record in report.records:
        c_values = [str(record.c_index[cycle]) if cycle in record.c_index else "" for cycle in cycles]
        rows.append([record.connection] + c_values + [str(record.n_index), record.source])
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]

    lines = [f"{report.network} network, regime {report.regime}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(value.ljust(w) for value, w in zip(row, widths)))
    flags = ", ".join(f"{cycle}={flag}" for cycle, flag in report.pas.cycles.items())
    lines.append(f"p.a.s.: {flags}, network={report.pas.network}")
    if report.caveats:
        lines.append(f"caveats: {', '.join(report.caveats)}")
    return "\n".join(lines)


def compare_index(analytic: ExtReal, estimate: IndexEstimate, tolerance: float, thick: bool = False):
    """(|delta| or None, passed, note) for one analytic value against its estimate"""
    fractions = estimate.attracted_fraction
    slack = 3.0 / math.sqrt(estimate.samples)
    if analytic.is_pos_inf:
        toward_one = all(b >= a - slack for a, b in zip(fractions, fractions[1:]))
        return None, estimate.sigma.is_pos_inf or toward_one, "attracted fraction non-decreasing toward 1"
    if analytic.is_neg_inf:
        toward_zero = all(b <= a + slack for a, b in zip(fractions, fractions[1:]))
        return None, estimate.sigma.is_neg_inf or toward_zero, "attracted fraction non-increasing toward 0"
    if not estimate.sigma.is_finite:
        return None, False, "estimate is infinite"
    delta = abs(estimate.sigma.value - analytic.value)
    if thick:
        return delta, estimate.sigma.sign() == analytic.sign(), "sign only (model_extrapolated)"
    return delta, delta <= tolerance, ""


def sweep_grid(config: RunConfig) -> List[Dict[str, float]]:
    if not config.sweep:
        return []
    names = sorted(config.sweep)
    axes = [config.sweep[name].values() for name in names]
    return [dict(zip(names, values)) for values in itertools.product(*axes)]


def _json(value: Any):
    if isinstance(value, ExtReal):
        return value.to_json()
    if isinstance(value, float):
        return round_sig(value)
    return value


class HetNet:
    """Command-line application around the index library"""

    def __init__(self, db_path: Optional[str] = None, settings_path: Optional[str] = None):
        self.logger = setup_logger(__name__)
        self.settings = load_settings(settings_path, self.logger) if settings_path else load_settings(logger=self.logger)
        self.database = ResultsDatabase(db_path or self.settings.db_path)
        self.logger.info(f"🧮 hetnet initialized (results in {self.database.db_path})")

    # ==========================================
    # Option resolution
    # ==========================================

    def resolve(self, config: Optional[RunConfig], args: argparse.Namespace) -> Dict[str, Any]:
        """Command-line flags override config options, which override settings"""
        options = config.options if config else None
        s = self.settings

        def pick(flag, option, default):
            if flag is not None:
                return flag
            if option is not None:
                return option
            return default

        flags = parse_cli_options(getattr(args, "eps_grid", None), getattr(args, "samples", None),
                                  getattr(args, "tolerance", None))
        eps_grid = pick(flags.eps_grid, options.eps_grid if options else None, s.eps_grid)
        if max(eps_grid) >= s.domain_margin:
            raise InvalidInput(f"eps values must lie below the domain margin {s.domain_margin}, got {max(eps_grid)}")
        return {
            "eps_grid": eps_grid,
            "samples": pick(flags.samples, options.samples if options else None, s.samples),
            "seed": pick(getattr(args, "seed", None), options.seed if options else None, s.seed),
            "n_cap": pick(None, options.n_cap if options else None, s.n_cap),
            "nu_convention": pick(getattr(args, "nu_convention", None),
                                  options.nu_convention if options else None, "composed"),
            "out_dir": Path(pick(getattr(args, "out", None), options.out_dir if options else None, s.out_dir)),
            "tolerance": pick(flags.tolerance, options.tolerance if options else None, s.tolerance),
            "full_state": bool(getattr(args, "full_state", False) or (options.full_state if options else False)),
            "dump_samples": bool(getattr(args, "dump_samples", False)),
            "connections": options.connections if options else None,
            "witness_count": options.witness_count if options else 1,
            "max_draws": options.max_draws if options else 20000,
        }

    def build_network(self, config: RunConfig, opts: Dict[str, Any], **overrides):
        spec = config.build_spec(**overrides)
        margin = self.settings.domain_margin
        if config.network == "B3B3":
            return b3b3.network_for(spec, config.assumptions, margin, opts["n_cap"], opts["nu_convention"])
        return b2b2.network_for(spec, config.assumptions, margin, opts["n_cap"])

    def _write(self, out_dir: Path, name: str, payload: Any, text: Optional[str] = None) -> Path:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{name}.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
        if text is not None:
            with open(out_dir / f"{name}.txt", "w", encoding="utf-8") as f:
                f.write(text + "\n")
        return path

    @staticmethod
    def _samples_path(opts: Dict[str, Any], network: str, connection: str, level: str) -> Optional[str]:
        if not opts["dump_samples"]:
            return None
        return str(opts["out_dir"] / f"samples_{network}_{connection}_{level}.csv")

    # ==========================================
    # Commands
    # ==========================================

    async def cmd_analyze(self, config: RunConfig, opts: Dict[str, Any], run_id: Optional[int] = None) -> IndexReport:
        network = self.build_network(config, opts)
        report = await asyncio.to_thread(network.analyze)
        table = format_table(report)
        path = self._write(opts["out_dir"], f"analyze_{report.network}", report.model_dump(mode="json"), table)
        self.database.save_report(report, run_id)
        print(table)
        self.logger.info(f"💾 Report written to {path}")
        return report

    async def cmd_verify(self, config: RunConfig, opts: Dict[str, Any],
                         run_id: Optional[int] = None) -> VerificationReport:
        network = self.build_network(config, opts)
        report = await asyncio.to_thread(network.analyze)
        wanted = opts["connections"] or [record.connection for record in report.records]

        rows: List[VerificationRow] = []
        estimates: List[IndexEstimate] = []
        for record in report.records:
            if record.connection not in wanted:
                continue
            targets = [("network", record.n_index, "model_extrapolated" in record.caveats)]
            targets += [(cycle, value, False) for cycle, value in sorted(record.c_index.items())]
            for level, analytic, thick in targets:
                try:
                    estimate = await asyncio.to_thread(
                        estimate_sigma_mc, network.spec, record.connection, level,
                        opts["eps_grid"], opts["samples"], opts["seed"], self.settings.domain_margin,
                        self.settings.max_steps, self.settings.attraction_floor, self.settings.chunk_size,
                        worker_count(), self.settings.show_progress, full_state=opts["full_state"],
                        csv_path=self._samples_path(opts, report.network, record.connection, level))
                except InsufficientSamples as e:
                    self.logger.warning(f"⚠️ {record.connection} ({level}): {e}")
                    rows.append(VerificationRow(connection=record.connection, level=level, analytic=analytic,
                                                delta=None, passed=False, note=f"insufficient samples: {e}"))
                    continue
                estimates.append(estimate)
                delta, passed, note = compare_index(analytic, estimate, opts["tolerance"], thick)
                icon = "✅" if passed else "❌"
                self.logger.info(f"{icon} {record.connection} ({level}): analytic {analytic}, MC {estimate.sigma}")
                rows.append(VerificationRow(connection=record.connection, level=level, analytic=analytic,
                                            estimate=estimate.sigma, delta=delta, passed=passed, note=note))

        nu_comparison = b3b3.nu_convention_comparison(network.spec) if config.network == "B3B3" else None
        result = VerificationReport(network=report.network, tolerance=opts["tolerance"], rows=rows,
                                    nu_comparison=nu_comparison)
        self.database.save_estimates_batch(estimates, run_id)

        lines = [f"{'connection':<10} {'level':<8} {'analytic':>12} {'estimate':>12} {'|delta|':>10}  result"]
        for row in rows:
            delta = f"{row.delta:.4f}" if row.delta is not None else "-"
            lines.append(f"{row.connection:<10} {row.level:<8} {str(row.analytic):>12} {str(row.estimate or '-'):>12} "
                         f"{delta:>10}  {'PASS' if row.passed else 'FAIL'} {row.note}")
        if nu_comparison:
            lines.append("nu~ convention comparison: " + ", ".join(
                f"{key}={value:.6g}" for key, value in nu_comparison.items()))
        table = "\n".join(lines)
        self._write(opts["out_dir"], f"verify_{report.network}", result.model_dump(mode="json"), table)
        print(table)
        return result

    def _sweep_row(self, config: RunConfig, opts: Dict[str, Any], point: Dict[str, float]) -> Dict[str, Any]:
        row: Dict[str, Any] = dict(point)
        try:
            network = self.build_network(config, opts, **point)
            report = network.analyze()
            derived = report.derived
            names = ("delta", "delta_t", "sigma", "sigma_t") if config.network == "B3B3" else \
                ("rho", "delta", "rho_t", "delta_t")
            for name in names:
                row[name] = derived[name]
            for record in report.records:
                for cycle, value in sorted(record.c_index.items()):
                    row[f"c_{record.connection}_{cycle}"] = value
                row[f"n_{record.connection}"] = record.n_index
            for cycle, flag in report.pas.cycles.items():
                row[f"pas_{cycle}"] = flag
            row["pas_network"] = report.pas.network
            row["regime"] = report.regime
            row["error"] = ""
        except (HetNetError, ValueError) as e:
            row["regime"] = ""
            row["error"] = f"{type(e).__name__}: {e}"
        return {key: _json(value) for key, value in row.items()}

    def sweep_columns(self, config: RunConfig) -> List[str]:
        params = sorted(config.sweep or {})
        if config.network == "B3B3":
            derived = ["delta", "delta_t", "sigma", "sigma_t"]
            c_cols = [f"c_{conn}_{cycle}" for conn, cycle in b3b3.INDEX_ORDER]
            n_cols = [f"n_{conn}" for conn in b3b3.CONNECTIONS]
            pas = [f"pas_{cycle}" for cycle in b3b3.CYCLES]
        else:
            derived = ["rho", "delta", "rho_t", "delta_t"]
            c_cols = [f"c_{conn}_{cycle}" for cycle in b2b2.CYCLES for conn in b2b2.CYCLE_CONNECTIONS[cycle]]
            n_cols = [f"n_{conn}" for conn in b2b2.CONNECTIONS]
            pas = [f"pas_{cycle}" for cycle in b2b2.CYCLES]
        return params + derived + c_cols + n_cols + pas + ["pas_network", "regime", "error"]

    async def cmd_sweep(self, config: RunConfig, opts: Dict[str, Any], run_id: Optional[int] = None) -> Path:
        grid = sweep_grid(config)
        self.logger.info(f"🔍 Sweeping {len(grid)} parameter sets")

        def run_rows():
            with ThreadPoolExecutor(max_workers=worker_count()) as pool:
                return list(pool.map(lambda point: self._sweep_row(config, opts, point), grid))

        rows = await asyncio.to_thread(run_rows)
        columns = self.sweep_columns(config)
        opts["out_dir"].mkdir(parents=True, exist_ok=True)
        path = opts["out_dir"] / f"sweep_{config.network}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)

        stats = self.database.save_sweep_rows(rows, run_id)
        failed = sum(1 for row in rows if row.get("error"))
        self.logger.info(f"📊 Sweep done: {len(rows)} rows, {failed} with errors ({stats})")
        print(f"📈 {len(rows)} rows written to {path}")
        return path

    async def cmd_witness(self, config: RunConfig, opts: Dict[str, Any], kind: str,
                          run_id: Optional[int] = None) -> List[Dict[str, Any]]:
        if config.network != "B3B3":
            raise InvalidInput("Witness searches exist for the B3B3 network only")
        base = config.build_spec() if config.eigenvalues else None
        if kind == "nonpas":
            specs = [await asyncio.to_thread(b3b3.find_nonpas_witness, config.box, opts["seed"], base,
                                             opts["max_draws"])]
            assumptions = ["contracting_returns", "weak_transverse"]
        else:
            specs = await asyncio.to_thread(b3b3.find_stabilizing_witnesses, config.box, opts["seed"],
                                            opts["witness_count"], base, opts["max_draws"])
            assumptions = ["contracting_returns"]

        found = []
        for spec in specs:
            report = b3b3.analyze(spec, assumptions, self.settings.domain_margin, opts["n_cap"])
            self.database.save_report(report, run_id)
            found.append({"eigenvalues": spec.eigenvalues(), "report": report.model_dump(mode="json")})
            print(format_table(report))
        self._write(opts["out_dir"], f"witness_{kind}", found)
        self.logger.info(f"✅ {len(found)} {kind} witness(es) written")
        return found

    async def run(self, args: argparse.Namespace) -> int:
        if args.command == "status":
            self.database.print_database_status()
            return EXIT_OK

        started_at = datetime.now()
        network = None
        run_id = None
        try:
            if not args.config:
                raise InvalidInput(f"{args.command} needs --config")
            config = load_run_config(args.config)
            network = config.network
            opts = self.resolve(config, args)
            run_id = self.database.log_run_session(args.command, network, started_at, args.config)

            if args.command == "analyze":
                await self.cmd_analyze(config, opts, run_id)
            elif args.command == "verify":
                result = await self.cmd_verify(config, opts, run_id)
                if not result.passed:
                    self.logger.error("❌ Verification failed")
                    self.database.finish_run_session(run_id, EXIT_FAILED, "verification failed")
                    return EXIT_FAILED
            elif args.command == "sweep":
                await self.cmd_sweep(config, opts, run_id)
            elif args.command == "witness":
                await self.cmd_witness(config, opts, args.kind, run_id)
            return EXIT_OK

        except (HetNetError, ValueError) as e:
            code = exit_code_for(e)
            self.logger.error(f"❌ {args.command} failed: {e}")
            print(f"❌ {e}", file=sys.stderr)
            if run_id:
                self.database.finish_run_session(run_id, code, str(e))
            else:
                self.database.log_run_session(args.command, network, started_at, args.config, code, str(e))
            return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Stability indices of heteroclinic networks")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="Run configuration (JSON)")
    parser.add_argument("--seed", type=int, help="Monte-Carlo seed")
    parser.add_argument("--samples", type=int, help="Samples per eps value")
    parser.add_argument("--eps-grid", dest="eps_grid", help="Comma-separated, descending eps values")
    parser.add_argument("--nu-convention", dest="nu_convention", choices=("composed", "display"))
    parser.add_argument("--tolerance", type=float, help="Allowed |analytic - estimate| in verify")
    parser.add_argument("--full-state", dest="full_state", action="store_true",
                        help="Monte-Carlo through the four-coordinate maps instead of the reduced ones")
    parser.add_argument("--dump-samples", dest="dump_samples", action="store_true",
                        help="Write per-point and per-eps Monte-Carlo CSVs next to the verify report")
    parser.add_argument("--kind", choices=("nonpas", "stabilizing"), default="nonpas", help="Witness kind")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--db-path", dest="db_path", help="Results database")
    return parser


async def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    try:
        app = HetNet(args.db_path)
    except HetNetError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INVALID
    return await app.run(args)


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
