"""
Automorphic verification command line
Runs the verification suites for regularized integrals and writes machine-readable reports
"""

import sys
import json
import math
import time
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from automorphic.complexfn import ContourError, Jet, lambda_complete
from automorphic.config import AutomorphicError, ConfigError, RunConfig, config
from automorphic.coset import as_intmat, decompose, enumerate_cosets_r2, soundness_checks, verify
from automorphic.eisenstein import (EPSTEIN_POINTS, EisSpec, Point, act, constant_term_many, epstein_sum,
                                    error_bound, eval, eval_many, hecke_apply_many, truncate)
from automorphic.forms import build_form, constant_fn, delta_square_fn, eisenstein_fn, eisenstein_product
from automorphic.lattice import LatticeSpec, verify_lemma
from automorphic.mellin_arch import (decay_checks, decay_table, global_sum_checks, mellin_checks,
                                     sobolev_checks, whittaker_arch)
from automorphic.padic import PadicCharSpec, verify_padic, whittaker_na
from automorphic.products import (MScalarJet, deformation_checks, reg_eisenstein_finite_part,
                                  rip_unitary_closed_form, rip_unitary_lhs, rip_unitary_rhs,
                                  rip_unitary_rhs_as_printed, vanishing_checks)
from automorphic.regint import BoundaryExponentError, ProfileMismatchError, RegularizedIntegralEngine
from automorphic.reporting import CheckRecord, Report, to_jsonable, write_report, write_table
from automorphic.scalars import (ZetaConstants, functional_B_quadrature, functionals_BC, hecke_eigenvalue,
                                 invariance_defect, lambda_jet, lambda_residue_forms, m_scalar,
                                 reg_hecke_defect, spherical_pole_residue, volume_forms)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# numerical breakdowns are check failures, not usage errors
NUMERICAL_ERRORS = (ContourError, ProfileMismatchError, BoundaryExponentError)

FI_S_GRID = [0.1 + 0.5j, -0.1 + 0.5j, 0.4 + 0.3j, -0.4 - 0.3j, 0.05 + 0.9j, 0.3 - 0.6j]
# the unfolding oracle for cusp forms converges for |Re s| > 1/2 only
FI_S_GRID_CUSPIDAL = [0.8 + 0.5j, -0.8 + 0.5j, 1.2 + 0.3j, -0.7 - 1.0j]
CUSPIDAL_FORMS = ("delta_square",)

HECKE_X = np.array([0.11, -0.31, 0.4, 0.0])
HECKE_Y = np.array([1.3, 0.95, 2.2, 1.0])


def setup_logging(level: Optional[str] = None):
    """Configure logging once for the command line"""
    system = config.get_system_config()
    logging.basicConfig(
        level=getattr(logging, (level or system["log_level"]).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(system["log_file"]),
            logging.StreamHandler()
        ]
    )
    return logging.getLogger(__name__)


def significant(value, digits: int = 12):
    """Round a real or complex scalar to the given number of significant digits"""
    value = complex(value)
    real = float(f"{value.real:.{digits}g}")
    if value.imag == 0:
        return real
    return [real, float(f"{value.imag:.{digits}g}")]


def scalar_table() -> Dict[str, object]:
    """All scalar constants of Q used by the suites"""
    lam = lambda_jet(2)
    closed, via_lambda = volume_forms()
    C, B = functionals_BC()
    mjet = MScalarJet()
    values = {
        "lambda_residue": lam.residue,
        "lambda_order0": lam.coeff(0),
        "lambda_derivative1": lam.derivative(1),
        "lambda_derivative2": lam.derivative(2),
        "zeta_star": ZetaConstants().zeta_star,
        "volume_closed": closed,
        "volume_via_lambda": via_lambda,
        "functional_C": C,
        "functional_B": B,
        "m0": mjet.m(0),
        "m1": mjet.m(1),
        "m2": mjet.m(2),
        "m3": mjet.m(3),
        "m_pole_residue": spherical_pole_residue(),
        "reg_hecke_defect_p2": reg_hecke_defect(2),
        "invariance_defect_q2": invariance_defect(2),
    }
    return {name: significant(value) for name, value in values.items()}


class VerificationRunner:
    """Runs the selected suites with crash isolation and assembles one report"""

    def __init__(self, run_config: RunConfig):
        self.run_config = run_config
        self.tol = run_config.tolerances
        self.logger = logging.getLogger(__name__)
        self._engine = None
        self.tables: Dict[str, object] = {}
        self.suites: Dict[str, Callable[[Report], None]] = {
            "constants": self.suite_constants,
            "eisenstein": self.suite_eisenstein,
            "hecke": self.suite_hecke,
            "regint": self.suite_regint,
            "products": self.suite_products,
            "coset": self.suite_coset,
            "padic": self.suite_padic,
            "mellin": self.suite_mellin,
            "lattice": self.suite_lattice,
        }

    @property
    def engine(self) -> RegularizedIntegralEngine:
        if self._engine is None:
            self._engine = RegularizedIntegralEngine()
        return self._engine

    def run_suite(self, name: str) -> Report:
        report = Report(suite=name)
        start = time.time()
        self.logger.info(f"Starting suite {name}")
        try:
            self.suites[name](report)
        except Exception as e:
            self.logger.error(f"Suite {name} crashed: {e}")
            report.error = f"{type(e).__name__}: {e}"
        report.wall_time = time.time() - start
        status = "passed" if report.passed else "FAILED"
        self.logger.info(f"Suite {name} {status} in {report.wall_time:.1f}s")
        return report

    def run(self) -> List[Report]:
        names = self.run_config.suites
        workers = min(self.run_config.jobs, config.get_system_config()["max_workers"], len(names))
        if workers <= 1:
            return [self.run_suite(name) for name in names]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(self.run_suite, names))

    def suite_constants(self, report: Report):
        tol = self.tol["identity"]
        lam = lambda_jet(2)
        report.add(CheckRecord.compare("lambda_residue", "lambda_F has residue 3/pi at 0",
                                       lam.residue.real, 3 / math.pi, 1e-9, ref="lambda-F-laurent"))
        forms = lambda_residue_forms()
        for key in ("via_Lambda2", "via_pole_at_0", "via_pole_at_1"):
            report.add(CheckRecord.compare(f"lambda_residue_{key}", "closed forms of the residue of lambda_F",
                                           forms[key], 3 / math.pi, 1e-9, ref="lambda-F-laurent"))
        report.add(CheckRecord.compare("lambda_order0", "constant Laurent coefficient of lambda_F at 0",
                                       lam.coeff(0).real, forms["order_0"], 1e-9, ref="lambda-F-order-0"))
        closed, via_lambda = volume_forms()
        report.add(CheckRecord.compare("volume_closed", "Vol([PGL2]) = 2 zeta(2)/pi", closed, math.pi / 3, 1e-9,
                                       ref="volume"))
        report.add(CheckRecord.compare("volume_lambda", "Vol([PGL2]) = zeta*/lambda^(-1)(0)",
                                       via_lambda, math.pi / 3, 1e-9, ref="volume-via-lambda"))
        report.add(CheckRecord.compare("volume_quadrature", "regularized integral of 1 by quadrature",
                                       self.engine.volume_by_quadrature(), math.pi / 3, 1e-4,
                                       ref="volume-via-lambda"))

        rng = np.random.default_rng(self.run_config.seed)
        s = rng.uniform(-3, 4, 100) + 1j * rng.uniform(-10, 10, 100)
        defect = float(np.max(np.abs(lambda_complete(s) - lambda_complete(1 - s)) / np.abs(lambda_complete(s))))
        report.add(CheckRecord.compare("functional_equation", "Lambda(s) = Lambda(1 - s) on random points",
                                       defect, 0.0, 1e-10, ref="completed-zeta"))
        for anchor, expected in ((0.0, -1.0), (1.0, 1.0)):
            residue = Jet.from_function(lambda_complete, anchor, -1, 1).residue
            report.add(CheckRecord.compare(f"Lambda_residue_{anchor:g}", "residues of Lambda at 0 and 1",
                                           residue, expected, 1e-9, ref="completed-zeta"))
        report.add(CheckRecord.compare("functional_B", "B functional: jet vs theta integral",
                                       functionals_BC()[1], functional_B_quadrature(), tol,
                                       ref="functionals-B-C"))
        m_residue = Jet.from_function(m_scalar, 0.5, -1, 1, radius=0.1).residue
        report.add(CheckRecord.compare("m_pole_residue", "residue of m(s) at the spherical pole",
                                       m_residue, spherical_pole_residue(), tol, ref="constant-term-pole"))

    def suite_eisenstein(self, report: Report):
        tol = self.tol["identity"]
        for k, (s0, (x, y)) in enumerate(EPSTEIN_POINTS):
            point = Point(x, y)
            report.add(CheckRecord.compare(f"lattice_sum_{k}", "Fourier evaluation equals the direct lattice sum",
                                           eval(EisSpec(s0=s0), point), epstein_sum(s0, point), 1e-8,
                                           relative=True, ref="eisenstein-series"))

        spec = EisSpec(s0=0.3)
        z = Point(0.21, 1.37)
        base = eval(spec, z)
        moved = max(abs(eval(spec, act(g, z)) - base)
                    for g in ([[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [7, 4]]))
        report.add(CheckRecord.compare("modular_invariance", "E(gz) = E(z) for g in SL2(Z)", moved, 0.0, 1e-9,
                                       ref="eisenstein-series"))

        h = 1e-3
        x, y = 0.13, 1.2
        xs = np.array([x, x + h, x - h, x, x])
        ys = np.array([y, y, y, y + h, y - h])
        v = eval_many(spec, xs, ys)
        laplacian = -y ** 2 * ((v[1] + v[2] - 2 * v[0]) + (v[3] + v[4] - 2 * v[0])) / h ** 2
        report.add(CheckRecord.compare("laplacian", "Delta E(s) = (1/4 - s^2) E(s)", laplacian / v[0],
                                       0.25 - spec.s0 ** 2, 1e-4, relative=True, ref="eisenstein-series"))

        n = 64
        grid = (np.arange(n) + 0.5) / n - 0.5
        average = complex(np.mean(eval_many(spec, grid, np.full(n, 2.0))))
        report.add(CheckRecord.compare("constant_term", "x-average equals y^{1/2+s} + m(s) y^{1/2-s}",
                                       average, constant_term_many(spec, [2.0])[0], tol,
                                       ref="eisenstein-constant-term"))
        high = Point(0.1, 3.0)
        report.add(CheckRecord.compare("truncation", "Lambda^T E = E - E_N above height T",
                                       truncate(spec, high, 2.0), eval(spec, high) - constant_term_many(spec, [3.0])[0],
                                       1e-12, ref="truncation"))
        regular = eval(EisSpec(s0=0.5, variant="classical"), z) - eval(EisSpec(s0=0.5, variant="reg"), z)
        report.add(CheckRecord.compare("classical_shift", "E_cl(1/2) - E_reg(1/2) = lambda^(0)(0)",
                                       regular, lambda_jet(0).coeff(0), tol, ref="reg-eisenstein"))

    def suite_hecke(self, report: Report):
        x, y = HECKE_X, HECKE_Y
        spec = EisSpec(s0=0.3)
        sampler = lambda a, b: eval_many(spec, a, b)
        for p in (2, 3, 5):
            image = hecke_apply_many(sampler, p, x, y)
            error = float(np.max(np.abs(image - hecke_eigenvalue(p, 0.3) * sampler(x, y))))
            report.add(CheckRecord.compare(f"eigenvalue_p{p}", "T(p) E(s) = lambda_p(s) E(s)", error, 0.0, 1e-8,
                                           ref="hecke-operator"))

        reg = lambda a, b: eval_many(EisSpec(s0=0.5, variant="reg"), a, b)
        report.add(CheckRecord.compare("reg_defect_p2", "(T(2) - 1) E_reg = log 2 / pi from the eigenvalue jet",
                                       reg_hecke_defect(2), math.log(2) / math.pi, 1e-9,
                                       ref="reg-eisenstein-hecke-defect"))
        for p in (2, 3, 5):
            def shifted(a, b, p=p):
                return hecke_apply_many(reg, p, a, b) - reg(a, b)

            once = shifted(x, y)
            error = float(np.max(np.abs(once - reg_hecke_defect(p))))
            report.add(CheckRecord.compare(f"reg_constant_p{p}", "(T(p) - 1) E_reg is the same constant everywhere",
                                           error, 0.0, 1e-6, ref="reg-eisenstein-hecke-defect"))
            squared = hecke_apply_many(shifted, p, x, y) - once
            report.add(CheckRecord.compare(f"reg_annihilated_p{p}", "(T(p) - 1)^2 E_reg = 0 at every point",
                                           float(np.max(np.abs(squared))), 0.0, 1e-6,
                                           ref="reg-eisenstein-hecke-defect"))

    def suite_regint(self, report: Report):
        tol = self.tol
        forms = [(constant_fn(1.0), FI_S_GRID), (eisenstein_product(0.3, 0.17j), FI_S_GRID),
                 (delta_square_fn(), FI_S_GRID_CUSPIDAL)]
        for phi, s_grid in forms:
            result = self.engine.verify_fundamental_identity(phi, s_grid, self.run_config.T_list)
            identity = "truncated pairing plus boundary terms equals R*(s)"
            report.add(CheckRecord.compare(f"{phi.name}:two_sided", identity,
                                           result["max_abs_diff"], 0.0, tol["identity"], ref="fundamental-identity"))
            report.add(CheckRecord.compare(f"{phi.name}:T_independence", "R*(s) does not depend on T",
                                           result["T_spread"], 0.0, tol["t_independence"],
                                           ref="fundamental-identity"))
            report.add(CheckRecord.compare(f"{phi.name}:functional_equation", "R*(s) = R*(-s)",
                                           result["functional_equation"], 0.0, tol["t_independence"],
                                           ref="fundamental-identity"))
        value = self.engine.reg_integral(eisenstein_fn(0.3)).value
        report.add(CheckRecord.compare("reg_eisenstein", "regularized integral of E(s0) vanishes",
                                       value, 0.0, 1e-6, ref="regularized-integral"))
        value = self.engine.reg_integral(constant_fn(1.0)).value
        report.add(CheckRecord.compare("reg_one", "regularized integral of 1 is the volume",
                                       value, math.pi / 3, 1e-4, ref="volume-via-lambda"))

    def suite_products(self, report: Report):
        tol = self.tol["products"]
        for name, row in vanishing_checks(self.engine).items():
            ref = "reg-eisenstein-integral" if name.startswith("E_reg^(") else "product-vanishing"
            report.add(CheckRecord.compare(name, "vanishing and closed-form values at s != 0",
                                           complex(*row["computed"]), row["expected"], 1e-4, ref=ref))
        lhs = rip_unitary_lhs(self.engine)
        rhs = rip_unitary_rhs()
        closed = rip_unitary_closed_form()
        report.add(CheckRecord.compare("unitary_lhs_vs_rhs", "regularized integral of E'(0)^2 vs scalar formula",
                                       lhs["value"], rhs, tol, relative=True, ref="unitary-product-formula"))
        report.add(CheckRecord.compare("unitary_rhs_vs_closed", "scalar formula vs Rankin-Selberg residue",
                                       rhs, closed, 1e-6, relative=True, ref="unitary-product-formula"))
        printed = rip_unitary_rhs_as_printed()
        report.notes["unitary_as_printed"] = {"value": printed, "formula": rhs,
                                              "relative_gap": abs(printed - rhs) / abs(rhs)}
        deformation = deformation_checks()
        report.add(CheckRecord.flag("deformation_limit", "deformed value tends to the scalar formula",
                                    dict(deformation, ok=deformation["monotone"]), ref="deformation-principle"))
        mjet = MScalarJet()
        report.add(CheckRecord.compare("m0", "m(0) = -1", mjet.m(0), -1.0, 1e-10, ref="intertwining-jet"))
        report.add(CheckRecord.compare("m2", "m''(0) = -m'(0)^2", mjet.m(2), -mjet.m(1) ** 2, 1e-8,
                                       ref="intertwining-jet"))
        lam = lambda_jet(0)
        report.add(CheckRecord.compare("reg_finite_part", "finite part of the regularized E_reg(1/2 + s) at 0",
                                       reg_eisenstein_finite_part(), -(lam.coeff(0) / lam.residue).real, 1e-6,
                                       ref="reg-eisenstein-integral"))

    def suite_coset(self, report: Report):
        for N in range(2, 13):
            row = enumerate_cosets_r2(N)
            report.add(CheckRecord.flag(f"enumerate_N{N}", "every coset of Gamma_0(N) has a verified normal form",
                                        dict(row, ok=row["passed"]), ref="coset-normal-form"))
        sound = soundness_checks(trials=1000, seed=self.run_config.seed)
        report.add(CheckRecord.flag("random_r234", "normal forms of random SL_r(Z) matrices verify exactly",
                                    dict(sound, ok=sound["passed"]), ref="coset-normal-form"))

    def suite_padic(self, report: Report):
        for p in (2, 3, 5):
            for key, row in verify_padic(p, trials=200, seed=self.run_config.seed).items():
                ref = "padic-whittaker" if "whittaker" in key else "padic-schwartz"
                report.add(CheckRecord.flag(f"p{p}:{key}", "index, norm, Mellin and Whittaker relations at p", row,
                                            ref=ref))

    def suite_mellin(self, report: Report):
        checks = {
            "mellin": (mellin_checks(), "archimedean-mellin"),
            "decay": (decay_checks(), "archimedean-whittaker"),
            "global": (global_sum_checks(), "global-whittaker"),
            "sobolev": (sobolev_checks(), "archimedean-sobolev"),
        }
        for family, (rows, ref) in checks.items():
            for key, row in rows.items():
                report.add(CheckRecord.flag(f"{family}:{key}", "archimedean Mellin and Whittaker relations", row,
                                            ref=ref))
        self.tables["decay"] = decay_table()

    def suite_lattice(self, report: Report):
        specs = [
            (LatticeSpec(field="Q", c=3.0), dict(m_grid=(1, 2, 4, 8))),
            (LatticeSpec(field="Qi", c=2.5), dict(m_grid=(1, 2, 4, 8), small_m_grid=(1, 2))),
        ]
        tables = []
        for spec, grids in specs:
            result = verify_lemma(spec, **grids)
            tables.append(result.pop("table"))
            for key in ("part1", "part2", "radius_doubling"):
                report.add(CheckRecord.flag(f"{spec.field}:{key}", "lattice-sum convergence estimates", result[key],
                                            ref="lattice-convergence"))
        self.tables["lattice"] = tables[0] if len(tables) == 1 else pd.concat(tables, ignore_index=True)

    def write(self, reports: List[Report]) -> dict:
        payload = write_report(reports, self.run_config.out, seed=self.run_config.seed)
        stem = self.run_config.out[:-5] if self.run_config.out.endswith(".json") else self.run_config.out
        for name, table in self.tables.items():
            write_table(table, f"{stem}_{name}.csv")
        return payload


def load_run_config(args: argparse.Namespace, suites: Optional[List[str]] = None) -> RunConfig:
    """RunConfig from an optional JSON file, overridden by command-line flags"""
    settings = {}
    if args.config:
        try:
            with open(args.config) as f:
                settings = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}")
        if not isinstance(settings, dict):
            raise ConfigError("the config file must hold a JSON object")
    for key in ("tol", "seed", "out", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    T_values = getattr(args, "T", None)
    if T_values:
        settings["T_list"] = list(T_values)
    if suites is not None:
        settings["suites"] = suites
    try:
        return RunConfig(**settings)
    except TypeError as e:
        raise ConfigError(f"invalid config: {e}")


def run_suites(args: argparse.Namespace, suites: Optional[List[str]]) -> int:
    run_config = load_run_config(args, suites)
    runner = VerificationRunner(run_config)
    reports = runner.run()
    payload = runner.write(reports)
    for report in reports:
        mark = "✅" if report.passed else "❌"
        print(f"{mark} {report.suite}: {sum(r.passed for r in report.records)}/{len(report.records)} checks"
              + (f" (crashed: {report.error})" if report.error else ""))
    return EXIT_PASS if payload["passed"] else EXIT_FAIL


def print_json(payload, status: int = EXIT_PASS) -> int:
    print(json.dumps(to_jsonable(payload), indent=2))
    return status


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a complex number")


def cmd_constants(args) -> int:
    status = run_suites(args, ["constants"])
    print_json(scalar_table())
    return status


def cmd_eisenstein(args) -> int:
    if args.z is not None:
        w = parse_complex(args.z)
        z = Point(w.real, w.imag)
    elif args.x is not None and args.y is not None:
        z = Point(args.x, args.y)
    else:
        raise ConfigError("eisenstein eval needs --z or both --x and --y")
    spec = EisSpec(s0=parse_complex(args.s), deriv=args.deriv, variant=args.variant)
    value = eval(spec, z)
    bound = error_bound(spec, z) + 1e-14 * max(1.0, abs(value))
    return print_json({"s": spec.s0, "z": [z.x, z.y], "variant": spec.variant, "deriv": spec.deriv,
                       "value": value, "error_bound": bound})


def _reg_int_payload(engine: RegularizedIntegralEngine, phi, T_list: List[float]) -> dict:
    """reg_integral at the first height, with the spread over the others and the profile gap"""
    results = [engine.reg_integral(phi, T=T) for T in T_list]
    payload = results[0].to_dict()
    payload["residual_checks"] = {
        "T_list": list(T_list),
        "T_spread": max(abs(r.value - results[0].value) for r in results),
        "profile_gap": max(engine.check_profile(phi, T) for T in T_list),
    }
    return payload


def cmd_reg_int(args) -> int:
    params = json.loads(args.params) if args.params else {}
    phi = build_form(args.phi, **params)
    engine = RegularizedIntegralEngine()
    run_config = load_run_config(args)
    payload = _reg_int_payload(engine, phi, run_config.T_list)
    ok = payload["residual_checks"]["T_spread"] <= run_config.tolerances["t_independence"]
    return print_json(payload, EXIT_PASS if ok else EXIT_FAIL)


def cmd_verify(args) -> int:
    if args.what != "fundamental-identity" or not args.phi:
        return run_suites(args, [VERIFY_SUITES[args.what]])
    params = json.loads(args.params) if args.params else {}
    phi = build_form(args.phi, **params)
    run_config = load_run_config(args)
    if args.s:
        s_grid = [parse_complex(v) for v in args.s]
    else:
        s_grid = FI_S_GRID_CUSPIDAL if args.phi in CUSPIDAL_FORMS else FI_S_GRID
    engine = RegularizedIntegralEngine()
    identity = engine.verify_fundamental_identity(phi, s_grid, run_config.T_list)
    payload = _reg_int_payload(engine, phi, run_config.T_list)
    payload["residual_checks"].update({key: identity[key]
                                       for key in ("max_abs_diff", "T_spread", "functional_equation")})
    payload["residual_checks"]["rows"] = identity["rows"]
    tol = run_config.tolerances
    ok = (identity["max_abs_diff"] <= tol["identity"] and identity["T_spread"] <= tol["t_independence"]
          and identity["functional_equation"] <= tol["t_independence"])
    return print_json(payload, EXIT_PASS if ok else EXIT_FAIL)


def cmd_coset(args) -> int:
    if args.enumerate:
        result = enumerate_cosets_r2(args.N)
        return print_json(result, EXIT_PASS if result["passed"] else EXIT_FAIL)
    if not args.matrix:
        raise ConfigError("coset needs --matrix or --enumerate")
    rows = [[int(v) for v in row.split(",")] for row in args.matrix.split(";")]
    A = as_intmat(rows)
    rep = decompose(A, args.N, args.flavor)
    verified = verify(A, rep)
    return print_json(dict(rep.to_dict(), verified=verified), EXIT_PASS if verified else EXIT_FAIL)


def cmd_padic(args) -> int:
    report = verify_padic(args.p, trials=args.trials, seed=args.seed if args.seed is not None else 20240601)
    return print_json(report, EXIT_PASS if all(row["ok"] for row in report.values()) else EXIT_FAIL)


def cmd_whittaker(args) -> int:
    s = parse_complex(args.s)
    if args.p:
        n = int(round(args.n))
        return print_json({"p": args.p, "n": n, "value": whittaker_na(PadicCharSpec(args.p, s=s), n)})
    return print_json({"s": s, "y": args.y, "closed": whittaker_arch(s, args.y),
                       "integral": whittaker_arch(s, args.y, path="integral")})


def cmd_mellin(args) -> int:
    report = mellin_checks()
    return print_json(report, EXIT_PASS if all(row["ok"] for row in report.values()) else EXIT_FAIL)


def cmd_lattice(args) -> int:
    spec = LatticeSpec(field=args.field, m=args.m, c=args.c)
    result = verify_lemma(spec, m_grid=(args.m,))
    table = result.pop("table")
    if args.out:
        write_table(table, args.out)
    else:
        print(table.to_csv(index=False))
    ok = all(result[k]["ok"] for k in ("part1", "part2", "radius_doubling"))
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run settings")
    common.add_argument("--tol", type=float, help="Override suite tolerances")
    common.add_argument("--seed", type=int, help="Seed for random corpora")
    common.add_argument("--out", help="Report path")
    common.add_argument("--jobs", type=int, help="Run suites in parallel")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(description="Regularized integrals on PGL2 over Q: verification suites",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="Scalar constants and volumes")

    eis = sub.add_parser("eisenstein", parents=[common], help="Evaluate Eisenstein series")
    eis_sub = eis.add_subparsers(dest="action", required=True)
    ev = eis_sub.add_parser("eval", parents=[common])
    ev.add_argument("--s", required=True)
    ev.add_argument("--z", help='point of the upper half-plane, e.g. "0.3+1.1j"')
    ev.add_argument("--x", type=float)
    ev.add_argument("--y", type=float)
    ev.add_argument("--deriv", type=int, default=0)
    ev.add_argument("--variant", default="plain", choices=["plain", "star", "reg", "classical"])

    ver = sub.add_parser("verify", parents=[common], help="Run one verification suite")
    ver.add_argument("what", choices=["fundamental-identity", "hecke", "products"])
    ver.add_argument("--phi", help="named function; checks the fundamental identity for it alone")
    ver.add_argument("--params", help='JSON parameters for --phi')
    ver.add_argument("--s", action="append", help="spectral parameter (repeatable)")
    ver.add_argument("--T", type=float, action="append", help="truncation height (repeatable)")

    reg = sub.add_parser("reg-int", parents=[common], help="Regularized integral of a named function")
    reg.add_argument("--phi", "--form", dest="phi", required=True)
    reg.add_argument("--params", help='JSON parameters, e.g. {"s1": 0.3, "s2": 0.1}')
    reg.add_argument("--T", type=float, action="append", help="truncation height (repeatable)")

    coset = sub.add_parser("coset", parents=[common], help="Gamma_0(N) normal forms")
    coset.add_argument("--N", type=int, required=True)
    coset.add_argument("--matrix", help='rows separated by ";", e.g. "2,1;7,4"')
    coset.add_argument("--flavor", default="gamma0", choices=["gamma0", "gamma0_minus"])
    coset.add_argument("--enumerate", action="store_true")

    padic = sub.add_parser("padic", parents=[common], help="p-adic Schwartz-Bruhat checks")
    padic_sub = padic.add_subparsers(dest="action", required=True)
    pv = padic_sub.add_parser("verify", parents=[common])
    pv.add_argument("--p", type=int, default=3)
    pv.add_argument("--trials", type=int, default=200)

    whit = sub.add_parser("whittaker", parents=[common], help="Local Whittaker functions")
    whit.add_argument("--s", required=True)
    whit.add_argument("--y", type=float, default=1.0)
    whit.add_argument("--p", type=int, help="finite place; evaluates at a(p^n)")
    whit.add_argument("--n", type=float, default=0)

    mel = sub.add_parser("mellin", parents=[common], help="Archimedean Mellin pair")
    mel_sub = mel.add_subparsers(dest="action", required=True)
    mel_sub.add_parser("roundtrip", parents=[common])

    lat = sub.add_parser("lattice", parents=[common], help="Lattice-sum estimates")
    lat.add_argument("--field", default="Q", choices=["Q", "Qi"])
    lat.add_argument("--m", type=int, default=1)
    lat.add_argument("--c", type=float, default=3.0)

    run = sub.add_parser("run", parents=[common], help="Run verification suites")
    run.add_argument("--suite", action="append", help="Suite to run (repeatable); all by default")
    return parser


VERIFY_SUITES = {"fundamental-identity": "regint", "hecke": "hecke", "products": "products"}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    logger = logging.getLogger(__name__)

    validation = config.validate_config()
    for warning in validation["warnings"]:
        logger.warning(warning)
    if not validation["valid"]:
        for error in validation["errors"]:
            logger.error(error)
        return EXIT_USAGE

    commands = {
        "constants": cmd_constants,
        "eisenstein": cmd_eisenstein,
        "verify": cmd_verify,
        "reg-int": cmd_reg_int,
        "coset": cmd_coset,
        "padic": cmd_padic,
        "whittaker": cmd_whittaker,
        "mellin": cmd_mellin,
        "lattice": cmd_lattice,
    }
    try:
        if args.command == "run":
            return run_suites(args, args.suite)
        return commands[args.command](args)
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as e:
        logger.error(f"{args.command} failed numerically: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAIL
    except (AutomorphicError, ValueError, KeyError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
