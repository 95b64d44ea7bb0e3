"""Headline analysis report and figure-data payloads for a sweep.

``analyze`` condenses a sweep table into tail statistics, chi-square tests,
and the five regression fits; ``figure_data`` renders per-panel CSV
payloads (r histogram, per-context mean CCFs, turn-lag distributions, and
exemplar trajectories).  Output is deterministic: regenerating from the
same table and config is byte-identical.
"""

import json
from dataclasses import dataclass

import numpy as np

from dyadsim import dynamics, metrics, stats, sweep as sweep_mod

__all__ = [
    "DEFAULT_FIGURE_CONTEXTS",
    "AnalysisReport",
    "analyze",
    "figure_data",
    "table1_csv_text",
    "report_json_text",
    "write_report",
    "write_payloads",
]

PACKAGE_NAME = "dyadsim"

# Representative interaction regimes used for the figure panels: uncoupled,
# full coupling, leader/follower, inhibited listener, inhibited follower,
# and an unstable mutual mimic-inhibit pairing.
DEFAULT_FIGURE_CONTEXTS = (
    dynamics.ContextMatrix(1, 0, 0, 1),
    dynamics.ContextMatrix(1, 1, 1, 1),
    dynamics.ContextMatrix(1, 0, 1, 0),
    dynamics.ContextMatrix(1, 0, 1, -1),
    dynamics.ContextMatrix(-1, 1, 0, 1),
    dynamics.ContextMatrix(-1, 1, 1, -1),
)

PANEL_NAMES = ("r_histogram", "ccf_panel", "lag_panel", "trajectory_panel")

UNIFORM_NEGATIVE_PROB = 65.0 / 81.0  # contexts with at least one -1 entry


@dataclass(frozen=True)
class AnalysisReport:
    """Aggregated sweep analysis plus the provenance needed to regenerate it."""

    sweep_summary: dict
    tails: dict
    chi_square: dict
    fits: list  # (ModelSpec, FitResult) pairs, model id order
    selected_model: dict
    provenance: dict

    def to_dict(self) -> dict:
        fits = {}
        for spec, fit in self.fits:
            fits[str(spec.model_id)] = {
                "name": spec.name,
                "k_nominal": fit.k_nominal,
                "k_effective": fit.k_effective,
                "r2": fit.r2,
                "adj_r2": fit.adj_r2,
                "aic": fit.aic,
                "bic": fit.bic,
                "rss": fit.rss,
                "n": fit.n,
            }
        return {
            "sweep": self.sweep_summary,
            "tails": self.tails,
            "chi_square": self.chi_square,
            "models": fits,
            "selected_model": self.selected_model,
            "provenance": self.provenance,
        }


def _chi2_dict(result: stats.Chi2Result) -> dict:
    return {"statistic": result.statistic, "df": result.df, "p_value": result.p_value}


def _with_context(label: str, func, *args):
    try:
        return func(*args)
    except ValueError as exc:
        raise ValueError(f"{label}: {exc}") from exc


def analyze(table: sweep_mod.SweepTable) -> AnalysisReport:
    """Compute the full statistical summary of a sweep table.

    Tail counts and inhibition rates for both tails, the goodness-of-fit
    test of the complementary tail's inhibition count against the 65/81
    share of inhibition-containing contexts (an even-split variant is
    included for comparison), the two-proportion test across tails, and the
    five regression fits with an AIC/BIC selection note.
    """
    counts = sweep_mod.tail_counts(table)
    n_total = len(table)
    n_undefined = counts.counts["undefined"]

    n_comp = counts.counts["complementary"]
    n_sync = counts.counts["synchronous"]
    neg_comp = counts.with_negative["complementary"]
    neg_sync = counts.with_negative["synchronous"]
    if n_comp == 0 or n_sync == 0:
        raise ValueError("tail statistics: a tail is empty; sweep too small")

    gof_uniform = _with_context(
        "complementary-vs-uniform chi-square",
        stats.chi2_gof,
        (neg_comp, n_comp - neg_comp),
        (UNIFORM_NEGATIVE_PROB, 1.0 - UNIFORM_NEGATIVE_PROB),
    )
    gof_even = _with_context(
        "complementary-vs-even-split chi-square",
        stats.chi2_gof,
        (neg_comp, n_comp - neg_comp),
        (0.5, 0.5),
    )
    two_prop = _with_context(
        "tail-comparison chi-square",
        stats.chi2_two_proportion,
        neg_comp,
        n_comp,
        neg_sync,
        n_sync,
    )

    fits = []
    for model_id in stats.MODEL_IDS:
        spec = stats.model_spec(model_id)
        design = stats.build_design(table, spec)
        fit = _with_context(
            f"model {model_id} fit",
            stats.fit_least_squares,
            design.X,
            design.y,
            design.columns,
            spec.k_nominal,
        )
        fits.append((spec, fit))

    best_aic = min(fit.aic for _, fit in fits)
    best_bic = min(fit.bic for _, fit in fits)
    by_aic = [spec.model_id for spec, fit in fits if fit.aic == best_aic]
    by_bic = [spec.model_id for spec, fit in fits if fit.bic == best_bic]
    selected = {
        "by_aic": by_aic,
        "by_bic": by_bic,
        "note": (
            "lowest information criteria: models "
            + "/".join(str(m) for m in sorted(set(by_aic + by_bic)))
        ),
    }

    config = table.config
    params = config.params
    provenance = {
        "artifact": PACKAGE_NAME,
        "artifact_version": _package_version(),
        "generator": dynamics.NoiseSource.ALGORITHM_ID,
        "numpy_version": np.__version__,
        "master_seed": config.master_seed,
        "runs_per_context": config.runs_per_context,
        "tail_threshold": config.tail_threshold,
        "alpha": params.alpha,
        "influence": params.influence,
        "noise_half_width": params.noise_half_width,
        "turns": params.turns,
    }

    design_n = fits[0][1].n
    report = AnalysisReport(
        sweep_summary={
            "records": n_total,
            "finite": n_total - n_undefined,
            "undefined": n_undefined,
            "regression_rows": design_n,
            "regression_excluded": n_total - design_n,
        },
        tails={
            label: {
                "count": counts.counts[label],
                "with_negative_entry": counts.with_negative[label],
                "negative_rate": (
                    counts.with_negative[label] / counts.counts[label]
                    if counts.counts[label]
                    else None
                ),
            }
            for label in sweep_mod.TAIL_LABELS
        },
        chi_square={
            "complementary_vs_uniform_65_81": _chi2_dict(gof_uniform),
            "complementary_vs_even_split": _chi2_dict(gof_even),
            "tail_comparison": _chi2_dict(two_prop),
        },
        fits=fits,
        selected_model=selected,
        provenance=provenance,
    )
    return report


def _package_version() -> str:
    from dyadsim import __version__

    return __version__


def report_json_text(report: AnalysisReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def table1_csv_text(report: AnalysisReport) -> str:
    return stats.fit_summary_csv_text(report.fits)


def _panel_batch(config: sweep_mod.SweepConfig, context: dynamics.ContextMatrix):
    """Seeded batch for one figure context, reusing the sweep's seed grid."""
    contexts = sweep_mod.enumerate_contexts()
    context_index = contexts.index(context)
    seeds = [
        sweep_mod.derive_run_seed(config.master_seed, context_index, j)
        for j in range(config.runs_per_context)
    ]
    B1, B2 = dynamics.simulate_batch(context, config.params, seeds)
    finite = np.isfinite(B1).all(axis=1) & np.isfinite(B2).all(axis=1)
    return B1, B2, finite, seeds


def figure_data(
    which: str,
    *,
    table: sweep_mod.SweepTable | None = None,
    config: sweep_mod.SweepConfig | None = None,
    contexts=None,
    max_lag: int = 20,
    bins: int = 40,
) -> dict:
    """CSV payloads for one figure panel, keyed by output filename.

    Panels: ``r_histogram`` (needs ``table``), ``ccf_panel``, ``lag_panel``
    and ``trajectory_panel`` (need ``config``; fresh seeded batches are run
    per requested context).  Context filenames carry the signed-digit code
    of (s1, o1, o2, s2), e.g. ``fig6_ccf_+10+1-1.csv``.
    """
    if which not in PANEL_NAMES:
        raise ValueError(f"unknown figure panel {which!r}; expected one of {PANEL_NAMES}")

    if which == "r_histogram":
        if table is None:
            raise ValueError("r_histogram needs a sweep table")
        r_finite = np.array([rec.r for rec in table.finite_records()])
        hist = metrics.histogram(r_finite, bins, -1.0, 1.0)
        return {"fig3_hist.csv": metrics.histogram_csv_text(hist)}

    if config is None:
        raise ValueError(f"{which} needs a sweep config")
    if contexts is None:
        contexts = DEFAULT_FIGURE_CONTEXTS

    payloads = {}
    for context in contexts:
        code = context.code()
        if which == "trajectory_panel":
            seed = sweep_mod.derive_run_seed(
                config.master_seed, sweep_mod.enumerate_contexts().index(context), 0
            )
            trajectory = dynamics.simulate(context, config.params, seed)
            payloads[f"fig2_traj_{code}.csv"] = dynamics.trajectory_csv_text(trajectory)
            continue
        B1, B2, finite, _ = _panel_batch(config, context)
        if which == "ccf_panel":
            results = [
                metrics.cross_correlation(B1[i], B2[i], max_lag)
                for i in range(len(finite))
                if finite[i]
            ]
            agg = metrics.aggregate_ccf(results)
            payloads[f"fig6_ccf_{code}.csv"] = metrics.ccf_csv_text(agg)
        else:  # lag_panel
            spec = metrics.LagSpec(max_lag=max_lag)
            counts = np.zeros(2 * max_lag + 1, dtype=int)
            total = 0
            for i in range(len(finite)):
                if not finite[i]:
                    continue
                dist = metrics.turn_lags(B1[i], B2[i], spec)
                counts += dist.counts
                total += dist.total_events
            merged = metrics.LagDistribution(
                max_lag=max_lag, counts=counts, total_events=total
            )
            payloads[f"fig7_lags_{code}.csv"] = metrics.lag_csv_text(merged)
    return payloads


def write_report(report: AnalysisReport, out_dir) -> list:
    """Write report.json, table1.csv and coefficients.csv; returns paths."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (
        ("report.json", report_json_text(report)),
        ("table1.csv", table1_csv_text(report)),
        ("coefficients.csv", stats.coefficients_csv_text(report.fits)),
    ):
        path = out / name
        path.write_text(text)
        written.append(path)
    return written


def write_payloads(payloads: dict, out_dir) -> list:
    """Write figure payloads (filename -> text) into a directory."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(payloads.items()):
        path = out / name
        path.write_text(text)
        written.append(path)
    return written
