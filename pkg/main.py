#!/usr/bin/env python3
"""
Command line front end for the modular units toolkit.

Every subcommand prints a rich table or formatted series, or a JSON document
with --format json.  Exit codes: 0 on success, 1 for violated preconditions,
2 when a requested precision cannot be reached.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from config import ToolkitSettings, configure_logging, resolve_settings
from cusps import Cusp, cusp_list_gamma1, cusp_list_gamma_upper1, matrix_for_cusp
from errors import ModularUnitsError, PreconditionError, PrecisionError
from exact_arith import minimal_polynomial
from generators import (HAUPTMODUL_TABLE, Variant, compute_tables, cusp_value_set, express_in_generators,
                        family_equivariance_check, fricke_family_component, generator_set, hauptmodul_series,
                        hauptmodul_spec, minpoly_set, vandermonde_discriminant)
from modfunc import (RationalVector, SiegelProduct, fricke, modularity_criterion, siegel, verify_fricke_siegel,
                     weierstrass_unit)
from qseries import CyclotomicPayload, PuiseuxSeries, SeriesPayload

logger = logging.getLogger("modunits")

SHOWN_TERMS = 12


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors routed to exit code 1."""

    def error(self, message):
        raise PreconditionError(message)


def _parse_factor(text: str):
    vector, _, exponent = text.rpartition(":")
    if not vector:
        raise PreconditionError(f"expected a/b,c/d:m, got {text!r}")
    try:
        return RationalVector.parse(vector), int(exponent)
    except ValueError as exc:
        raise PreconditionError(f"malformed exponent in {text!r}") from exc


def _parse_pole(text: str):
    cusp, _, order = text.rpartition(":")
    if not cusp:
        raise PreconditionError(f"expected cusp:order, got {text!r}")
    try:
        return Cusp.parse(cusp), int(order)
    except ValueError as exc:
        raise PreconditionError(f"malformed pole order in {text!r}") from exc


def _read_series(path: str) -> PuiseuxSeries:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise PreconditionError(f"cannot read series file {path}: {exc}") from exc
    if isinstance(document, dict) and "series" in document:
        document = document["series"]
    return PuiseuxSeries.from_payload(SeriesPayload.model_validate(document))


class ModularUnitsToolkit:
    """Dispatches subcommands and renders their results."""

    def __init__(self, settings: ToolkitSettings, console: Optional[Console] = None):
        """
        Args:
            settings: resolved run configuration
            console: output console, stdout by default
        """
        self.settings = settings
        self.console = console or Console()

    # -- rendering ----------------------------------------------------------

    def emit(self, payload: Dict[str, Any], render) -> None:
        if self.settings.output_format == "json":
            self.console.out(json.dumps(payload, indent=2, ensure_ascii=False), highlight=False)
        else:
            render()

    def emit_series(self, title: str, series: PuiseuxSeries, extra: Optional[Dict[str, Any]] = None) -> None:
        payload = dict(extra or {})
        payload["series"] = series.to_payload().model_dump()

        def render():
            self.console.print(title, markup=False, highlight=False)
            self.console.out(series.format(SHOWN_TERMS), highlight=False)

        self.emit(payload, render)

    def _table(self, title: str, columns: Sequence[str], rows: List[Sequence[str]]) -> None:
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*[str(cell) for cell in row])
        self.console.print(table)

    # -- subcommands --------------------------------------------------------

    def siegel_expand(self, args) -> None:
        r = RationalVector.parse(args.vector)
        self.emit_series(f"g{r} mod q^{self.settings.precision}", siegel(r, self.settings.precision),
                         {"vector": str(r)})

    def fricke_expand(self, args) -> None:
        r = RationalVector.parse(args.vector)
        self.emit_series(f"f{r} mod q^{self.settings.precision}", fricke(r, self.settings.precision),
                         {"vector": str(r)})

    def hauptmodul(self, args) -> None:
        variant = Variant(args.variant)
        spec = hauptmodul_spec(args.level)
        series = hauptmodul_series(args.level, variant, self.settings.precision)
        self.emit_series(f"hauptmodul of level {args.level} ({variant.value}) = {spec}", series,
                         {"level": args.level, "variant": variant.value, "product": str(spec)})

    def cusps(self, args) -> None:
        listing = cusp_list_gamma1(args.level) if args.group == "gamma1" else cusp_list_gamma_upper1(args.level)
        rows = [(str(s), str(matrix_for_cusp(s))) for s in listing]
        self.emit({"level": args.level, "group": args.group, "cusps": [row[0] for row in rows],
                   "matrices": [row[1] for row in rows]},
                  lambda: self._table(f"Cusps of {args.group} ({args.level})", ["Cusp", "Matrix"], rows))

    def cusp_values(self, args) -> None:
        values = cusp_value_set(args.level, jobs=self.settings.jobs)
        entries = []
        for s, value in values.entries:
            entries.append({"cusp": str(s), "value": CyclotomicPayload.from_number(value).model_dump(),
                            "approx": f"{value.to_complex():.6g}", "minpoly": str(minimal_polynomial(value))})
        self.emit({"level": args.level, "values": entries},
                  lambda: self._table(f"C_{args.level}", ["Cusp", "Value", "Approx", "Minimal polynomial"],
                                      [(e["cusp"], e["value"]["text"], e["approx"], e["minpoly"]) for e in entries]))

    def minpolys(self, args) -> None:
        polynomials = minpoly_set(args.level)
        self.emit({"level": args.level, "minpolys": [[str(c) for c in p.coeffs] for p in polynomials]},
                  lambda: self._table(f"Minimal polynomials of C_{args.level}", ["Degree", "Polynomial"],
                                      [(p.degree, p) for p in polynomials]))

    def weierstrass_unit(self, args) -> None:
        series = weierstrass_unit(args.m, args.level, self.settings.precision)
        self.emit_series(f"f^1_({args.m},{args.level}) mod q^{self.settings.precision}", series,
                         {"m": args.m, "level": args.level})

    def verify_identity(self, args) -> None:
        r, s = RationalVector.parse(args.r), RationalVector.parse(args.s)
        holds = verify_fricke_siegel(r, s, self.settings.precision)
        self.emit({"r": str(r), "s": str(s), "precision": self.settings.precision, "holds": holds},
                  lambda: self.console.print("OK" if holds else f"FAILED: f{r} - f{s} identity to "
                                             f"O(q^{self.settings.precision})", markup=False))

    def verify_criterion(self, args) -> None:
        if args.factor:
            product = SiegelProduct.from_factors([_parse_factor(f) for f in args.factor], args.level)
        else:
            product = hauptmodul_spec(args.level).product
        if args.at_level:
            product = product.at_level(args.at_level)
        holds, report = modularity_criterion(product)
        payload = {"product": str(product), **report.as_dict(), "holds": holds}
        self.emit(payload, lambda: self._table(f"Modularity criterion for {product}", ["Quantity", "Value"],
                                               [(k, v) for k, v in payload.items() if k != "product"]))

    def express(self, args) -> None:
        series = _read_series(args.series)
        if args.pole:
            profile = dict(_parse_pole(p) for p in args.pole)
        else:
            profile = args.max_pole_order
        result = express_in_generators(series, args.level, profile, Variant(args.variant))
        payload = {
            "level": args.level,
            "variant": result.variant.value,
            "numerator": [str(c) for c in result.numerator.coeffs],
            "denominator": [{"polynomial": [str(c) for c in p.coeffs], "power": k} for p, k in result.denominator],
            "text": str(result),
        }
        self.emit(payload, lambda: self.console.print(f"h = {result}", markup=False, highlight=False))

    def fricke_family(self, args) -> None:
        r = RationalVector.parse(args.vector) if args.vector else RationalVector(Fraction(1, args.level), 0)
        component = fricke_family_component(args.level, args.m, r, self.settings.precision)
        payload: Dict[str, Any] = {
            "level": args.level, "m": args.m, "vector": str(r),
            "siegel_part": component.siegel_part.to_payload().model_dump(),
            "fricke_part": component.fricke_part.to_payload().model_dump(),
        }
        if args.equivariance is not None:
            payload["equivariant"] = family_equivariance_check(args.level, args.m, args.equivariance,
                                                               self.settings.precision, r)

        def render():
            self.console.print(f"Siegel component at {r}:", markup=False)
            self.console.out(component.siegel_part.format(SHOWN_TERMS), highlight=False)
            self.console.print(f"Fricke component at {r}:", markup=False)
            self.console.out(component.fricke_part.format(SHOWN_TERMS), highlight=False)
            if "equivariant" in payload:
                self.console.print(f"sigma_{args.equivariance} equivariance: {payload['equivariant']}")

        self.emit(payload, render)

    def generators(self, args) -> None:
        generators = generator_set(args.level)
        variant = Variant(args.variant)
        names = generators.describe(variant)
        payload: Dict[str, Any] = {"level": args.level, "variant": variant.value, "generators": names}
        if generators.weierstrass and args.vandermonde:
            report = vandermonde_discriminant(*generators.weierstrass, self.settings.precision)
            payload["vandermonde"] = {"degree": report.degree, "rational": report.is_rational,
                                      "leading": str(report.leading_coefficient)}
        self.emit(payload, lambda: self._table(f"Generators of level {args.level}", ["Generator"],
                                               [(name,) for name in names]))

    def tables(self, args) -> None:
        levels = args.levels or sorted(HAUPTMODUL_TABLE)
        computed = compute_tables(levels, self.settings.jobs)
        self.emit({"levels": [table.model_dump() for table in computed]},
                  lambda: self._table("Level tables", ["N", "Cusps of X^1(N)", "Minimal polynomials"],
                                      [(t.level, " ".join(t.cusps_gamma_upper1), len(t.minpolys)) for t in computed]))

    # -- entry --------------------------------------------------------------

    def dispatch(self, args) -> None:
        handler = getattr(self, args.command.replace("-", "_"))
        logger.info("running %s with precision %s", args.command, self.settings.precision)
        handler(args)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="modunits",
        description="Exact q-expansions of Siegel, Fricke and Weierstrass modular units",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # C_5 with minimal polynomials
  python main.py cusp-values --level 5

  # q-expansion of g_1,7 to O(q^30) as JSON
  python main.py hauptmodul --level 7 --variant gamma1 --prec 30 --format json > g7.json

  # express a series in the generators of level 7
  python main.py express --level 7 --variant gamma1 --series g7.json --max-pole-order 0

  # using environment variables
  export MODUNITS_PREC=40
  export MODUNITS_LOG_LEVEL=INFO
  python main.py weierstrass-unit --m 4 --level 8
        """
    )
    common = _ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help="absolute q-precision (default: 60)")
    common.add_argument("--format", choices=["text", "json"], default=None, help="output format")
    common.add_argument("--jobs", type=int, default=None, help="parallel workers for cusp and level loops")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--log-file", default=None, help="also write the log to this file")

    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, parents=[common], help=help_text)

    for name, help_text in (("siegel-expand", "q-expansion of a Siegel function g_r"),
                            ("fricke-expand", "q-expansion of a Fricke function f_r")):
        sub = command(name, help_text)
        sub.add_argument("--vector", "-r", required=True, help='rational vector "a/b,c/d"')

    sub = command("hauptmodul", "q-expansion of the hauptmodul of level N")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.GAMMA_UPPER1.value)

    sub = command("cusps", "inequivalent cusps with their matrices")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--group", choices=["gamma1", "gamma_upper1"], default="gamma_upper1")

    for name, help_text in (("cusp-values", "values of the hauptmodul at the cusps"),
                            ("minpolys", "minimal polynomials of the cusp values")):
        sub = command(name, help_text)
        sub.add_argument("--level", "-N", type=int, required=True)

    sub = command("weierstrass-unit", "q-expansion of f^1_(m,N)")
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--level", "-N", type=int, required=True)

    sub = command("verify-identity", "check the Fricke-Siegel difference identity")
    sub.add_argument("--r", required=True)
    sub.add_argument("--s", required=True)

    sub = command("verify-criterion", "modularity criterion for a Siegel product")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--factor", action="append", help='factor "a/b,c/d:m", repeatable; default: hauptmodul data')
    sub.add_argument("--at-level", type=int, default=None, help="test at a multiple of the level")

    sub = command("express", "write a series in the hauptmodul and inverted minimal polynomials")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--series", required=True, help="series JSON as written by --format json")
    sub.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.GAMMA_UPPER1.value)
    sub.add_argument("--max-pole-order", type=int, default=0, help="pole order bound at every finite cusp")
    sub.add_argument("--pole", action="append", help='per-cusp bound "cusp:order", repeatable')

    sub = command("fricke-family", "Fricke family components of level N through m")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--vector", "-r", default=None, help="vector with primitive denominator N (default [1/N,0])")
    sub.add_argument("--equivariance", type=int, default=None, metavar="D", help="also check sigma_D equivariance")

    sub = command("generators", "generator set of level N")
    sub.add_argument("--level", "-N", type=int, required=True)
    sub.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.GAMMA_UPPER1.value)
    sub.add_argument("--vandermonde", action="store_true", help="also check the conjugate Vandermonde product")

    sub = command("tables", "cusp lists, cusp values and minimal polynomials for several levels")
    sub.add_argument("levels", type=int, nargs="*")
    return parser


def run(argv: Optional[Sequence[str]] = None, console: Optional[Console] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Returns:
        0 on success, 1 for precondition failures, 2 for precision failures
    """
    error_console = Console(stderr=True)
    try:
        args = build_parser().parse_args(argv)
        settings = resolve_settings(args.prec, args.format, args.jobs, args.log_level, args.log_file)
    except (PreconditionError, ValidationError) as exc:
        error_console.print(f"error: {exc}", markup=False)
        return 1
    configure_logging(settings)
    toolkit = ModularUnitsToolkit(settings, console)
    try:
        toolkit.dispatch(args)
    except PrecisionError as exc:
        logger.error("precision: %s", exc)
        return 2
    except (PreconditionError, ValidationError) as exc:
        logger.error("%s", exc)
        return 1
    except ModularUnitsError as exc:
        logger.error("internal consistency check failed: %s", exc)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
