import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from .artifacts import (
    CORPUS_HEADER,
    EXTREMAL_HEADER,
    FIT_HEADER,
    MODEL_HEADER,
    MODULE_HEADER,
    POLE_HEADER,
    SLICE_HEADER,
    extremal_rows,
    fit_rows,
    fit_summary,
    model_rows,
    module_rows,
    pole_rows,
    slice_rows,
    write_csv,
    write_json,
)
from .core import DegreeCurve, SampledSet, load_points, resolve_phi
from .corpus import run_corpus
from .extend import (
    DEFAULT_DEGREES as EXTEND_DEGREES,
    annihilator,
    evaluate_quotient,
    extendability_score,
    pole_candidates,
)
from .extremal import extremal_grid
from .hull import graph_set, harmonicity_residual, hull_slice, order_cross_check, pole_order_fit
from .modconst import ModuleQuery, ModuleVerdict, classify_module, module_constant, verdict_for
from .optimize import SolverOptions


logger = logging.getLogger(__name__)


def solver_options(conf) -> SolverOptions:
    tolerances = conf.tolerances
    return SolverOptions(
        pivot_tol=tolerances["pivot_tol"],
        feas_tol=tolerances["feas_tol"],
        max_iter=tolerances["max_iter"],
        refine_rounds=tolerances["refine_rounds"],
    )


def pole_options(conf) -> dict:
    tolerances = conf.tolerances
    return {
        "margin": tolerances["pole_margin"],
        "cluster_radius": tolerances["cluster_radius"],
        "removable_tol": tolerances["removable_tol"],
    }


def lambda_rule(conf, phi):
    """Per-point λ: the configured values, or h(z) from the top-degree annihilator."""
    values = conf.lambdas
    model = None
    if any(value == "extend" for value in values):
        model = annihilator(phi, max(EXTEND_DEGREES), null_tol=conf.tolerances["null_tol"])
    by_point = dict(zip(conf.points, values if len(values) > 1 else values * len(conf.points)))

    def _rule(z):
        value = by_point[z]
        if value == "extend":
            return evaluate_quotient(model, z, eps_div=conf.tolerances["eps_div"])
        return value

    return _rule


class Workflow:
    """A plurihull command: computes, writes artifacts, returns progress messages."""

    def run(self, conf) -> list[str]:
        return []


class ExtremalWorkflow(Workflow):
    def _sampled_set(self, conf) -> SampledSet:
        if conf.set == "circle":
            return SampledSet.circle(conf.N)
        if conf.set == "interval":
            return SampledSet.chebyshev_interval(conf.N)
        if conf.set == "graph":
            return graph_set(resolve_phi(conf.input, conf.N))
        return load_points(conf.set.split(":", 1)[1])

    def run(self, conf) -> list[str]:
        K = self._sampled_set(conf)
        if K.dim == 2:
            if not conf.w_grid:
                raise ValueError("A two-dimensional set needs w values (--w)")
            nodes = [(z, w) for z in conf.points for w in conf.w_grid]
        else:
            nodes = list(conf.points)

        d_max = max(conf.degrees)
        sweep = extremal_grid(
            K,
            nodes,
            d_max,
            threads=conf.threads,
            phase_count=conf.phase_count,
            options=solver_options(conf),
        )
        target = write_csv(conf.output, "extremal.csv", EXTREMAL_HEADER, extremal_rows(sweep))

        messages = [f"Estimated V_K on {len(K)} {K.label} samples up to degree {d_max}"]
        for node, value, error in zip(sweep.nodes, sweep.values, sweep.errors):
            if error:
                messages.append(f"{node}: failed ({error})")
            else:
                messages.append(f"V({node}) = {value:.10g}")
        messages.append(f"Wrote {target}")
        return messages


class ModuleConstantsWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        phi = resolve_phi(conf.input, conf.N)
        rule = lambda_rule(conf, phi)
        options = solver_options(conf)
        growth_ratio = conf.tolerances["growth_ratio"]

        lambdas = {z: rule(z) for z in conf.points}
        queries = [ModuleQuery(phi, z, lambdas[z], d) for z in conf.points for d in conf.degrees]

        def _solve(query: ModuleQuery):
            return module_constant(query, phase_count=conf.phase_count, options=options)

        with ThreadPoolExecutor(max_workers=max(1, conf.threads)) as pool:
            results = iter(list(pool.map(_solve, queries)))

        verdicts = []
        messages = []
        for z in conf.points:
            lam = lambdas[z]
            brackets = {d: next(results) for d in conf.degrees}
            curve = DegreeCurve()
            for d, bracket in brackets.items():
                curve.add(d, bracket.lb, bracket.ub, bracket.status)
                messages.append(
                    f"W({d}) at z={z}, λ={lam:.6g}: [{bracket.lb:.10g}, {bracket.ub:.10g}]"
                )
            verdict = verdict_for(brackets, growth_ratio)[0] if len(brackets) >= 3 else ""
            verdicts.append(ModuleVerdict(complex(z), complex(lam), verdict, curve))

        rows = module_rows(verdicts)
        target = write_csv(conf.output, "module_constants.csv", MODULE_HEADER, rows)
        messages.append(f"Wrote {target}")
        return messages


class ClassifyWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        phi = resolve_phi(conf.input, conf.N)
        tolerances = conf.tolerances

        verdicts = classify_module(
            phi,
            conf.points,
            lambda_rule(conf, phi),
            conf.degrees,
            tolerances["growth_ratio"],
            threads=conf.threads,
            phase_count=conf.phase_count,
            options=solver_options(conf),
        )
        report = extendability_score(
            phi,
            EXTEND_DEGREES,
            eps_res=tolerances["eps_res"] * phi.l2_norm(),
            stability_tol=tolerances["stability_tol"],
            plateau_factor=tolerances["plateau_factor"],
            null_tol=tolerances["null_tol"],
            pole_options=pole_options(conf),
        )

        target = write_csv(conf.output, "classify.csv", MODULE_HEADER, module_rows(verdicts))
        summary = {
            "input": conf.input,
            "extend_verdict": report.verdict,
            "residuals": {d: report.curve.lower(d) for d in report.curve.degrees},
            "poles": {d: [[p, m] for p, m in poles] for d, poles in report.poles.items()},
            "module_verdicts": [
                {"z": v.z, "lambda": v.lam, "verdict": v.verdict, "flags": list(v.flags)}
                for v in verdicts
            ],
        }
        summary_target = write_json(conf.output, "classify.json", summary)

        messages = [f"Extendability: {report.verdict}"]
        for verdict in verdicts:
            flags = f" ({', '.join(verdict.flags)})" if verdict.flags else ""
            messages.append(f"Module constants at z={verdict.z}: {verdict.verdict}{flags}")
        messages.append(f"Wrote {target} and {summary_target}")
        return messages


class ExtendWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        phi = resolve_phi(conf.input, conf.N)
        messages = []
        for d_k in conf.degrees:
            model = annihilator(phi, d_k, null_tol=conf.tolerances["null_tol"])
            poles = pole_candidates(model, **pole_options(conf))
            write_csv(conf.output, f"model_dk{d_k}.csv", MODEL_HEADER, model_rows(model))
            write_csv(conf.output, f"poles_dk{d_k}.csv", POLE_HEADER, pole_rows(poles))
            flags = f" [{', '.join(model.flags)}]" if model.flags else ""
            messages.append(
                f"d_k={d_k}: residual {model.residual:.3g}, "
                f"{sum(m for _, m in poles)} pole(s) in the disk{flags}"
            )
            for location, multiplicity in poles:
                messages.append(f"pole at {location:.6g} (multiplicity {multiplicity})")
        messages.append(f"Wrote models and pole reports to {conf.output}")
        return messages


class HullSliceWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        phi = resolve_phi(conf.input, conf.N)
        z0 = conf.points[0]
        sweep = hull_slice(
            phi,
            z0,
            conf.w_grid,
            max(conf.degrees),
            threads=conf.threads,
            phase_count=conf.phase_count,
            options=solver_options(conf),
        )
        target = write_csv(conf.output, "hull_slice.csv", SLICE_HEADER, slice_rows(sweep))
        write_json(conf.output, "hull_slice.json", {"z0": z0, "summary": sweep.summary})

        finite = sum(1 for value in sweep.values if math.isfinite(value))
        return [
            f"Evaluated {len(sweep)} w values at z0={z0}; {finite} finite",
            f"Graph/off-graph ratio: {sweep.summary}",
            f"Wrote {target}",
        ]


class PoleOrderWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        phi = resolve_phi(conf.input, conf.N)
        d_max = max(conf.degrees)
        options = solver_options(conf)

        fit = pole_order_fit(
            phi,
            conf.radii,
            conf.n_theta,
            d_max,
            threads=conf.threads,
            phase_count=conf.phase_count,
            options=options,
        )
        messages = [f"Fitted slope m̂ = {fit.m_hat:.6g}, order {fit.order}"]

        if conf.annulus:
            residual = harmonicity_residual(
                phi,
                conf.annulus,
                d_max,
                threads=conf.threads,
                phase_count=conf.phase_count,
                options=options,
            ).max_laplacian_residual
            fit = replace(fit, max_laplacian_residual=residual)
            messages.append(f"Laplacian residual {residual:.3g}")

        fit_order, multiplicity = order_cross_check(phi, fit)
        messages.append(f"Annihilator multiplicity at 0: {multiplicity} (fit order {fit_order})")

        target = write_csv(conf.output, "pole_order.csv", FIT_HEADER, fit_rows(fit))
        write_json(conf.output, "pole_order.json", fit_summary(fit, multiplicity))
        messages.append(f"Wrote {target}")
        return messages


class CorpusWorkflow(Workflow):
    def run(self, conf) -> list[str]:
        results = run_corpus(seed=conf.seed, threads=conf.threads)
        rows = [(result.name, result.passed, result.detail) for result in results]
        target = write_csv(conf.output, "corpus.csv", CORPUS_HEADER, rows)

        messages = [
            f"{'pass' if result.passed else 'FAIL'} {result.name}: {result.detail}"
            for result in results
        ]
        failed = [result.name for result in results if not result.passed]
        for result in results:
            if not result.passed:
                logger.error("Corpus check %s failed: %s", result.name, result.detail)
        if failed:
            raise RuntimeError(f"{len(failed)} corpus check(s) failed: {', '.join(failed)}")
        messages.append(f"All {len(results)} corpus checks passed; wrote {target}")
        return messages


WORKFLOWS = {
    "extremal": ExtremalWorkflow(),
    "module-constants": ModuleConstantsWorkflow(),
    "classify": ClassifyWorkflow(),
    "extend": ExtendWorkflow(),
    "hull-slice": HullSliceWorkflow(),
    "pole-order": PoleOrderWorkflow(),
    "corpus": CorpusWorkflow(),
}


def get_workflow(command: str) -> Workflow:
    try:
        return WORKFLOWS[command]
    except KeyError as exc:
        raise ValueError(f"Unsupported command: {command}") from exc
