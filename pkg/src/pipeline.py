import json

import pandas as pd
from joblib import Parallel, delayed

from branched import branched_summary
from config_loader import get_settings, resolve_path
from corpus import load_corpus
from errors import KhoflowError
from khovanov import khr_homology
from logger import get_logger
from report import SCHEMA_VERSION
from specseq import for_link, page

logger = get_logger(__name__)

SUMMARY_COLUMNS = [
    "diagram", "crossings", "components", "writhe", "det",
    "h1", "b1", "khr_total", "e2_total", "error",
]


def summarize(d, crossing_limit):
    """Determinant, H1, Khr total and E_2 total for one diagram."""
    row = {
        "diagram": d.name,
        "crossings": d.n_crossings,
        "components": d.n_components,
        "writhe": d.writhe,
    }
    try:
        branched = branched_summary(d)
        khr = khr_homology(d, crossing_limit=crossing_limit)
        e2 = page(for_link(d, crossing_limit=crossing_limit), 2, with_differentials=False)
    except KhoflowError as exc:
        logger.error(f"{d.name}: {exc}")
        return {**row, "error": str(exc)}, None

    row.update(
        det=branched["det"],
        h1=" ".join(str(f) for f in branched["h1_invariant_factors"]),
        b1=branched["b1"],
        khr_total=khr.total,
        e2_total=e2.total,
        error="",
    )
    detail = {
        "schema": SCHEMA_VERSION,
        "diagram": d.name,
        "pd": d.to_pd(),
        "branched": branched,
        "khr": khr.as_rows(),
        "e2": e2.as_rows(),
    }
    logger.info(f"Summarized {d.name}: det {row['det']}, Khr {khr.total}")
    return row, detail


def run_batch(settings=None, corpus=None, out_dir=None):
    """Summarize every corpus diagram under the crossing cap; write JSON and CSV."""
    settings = settings or get_settings()
    corpus = corpus or load_corpus(settings["paths"]["corpus"])
    out_dir = resolve_path(out_dir or settings["paths"]["report_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    cap = settings["audit"]["max_crossings"]
    limit = settings["khovanov"]["crossing_limit"]
    diagrams = list(corpus.diagrams(cap))
    logger.info(f"Batch over {len(diagrams)} diagrams with n_jobs={settings['general']['n_jobs']}")

    results = Parallel(n_jobs=settings["general"]["n_jobs"])(
        delayed(summarize)(d, limit) for d in diagrams
    )

    rows = []
    for row, detail in results:
        rows.append(row)
        if detail is not None:
            with open(out_dir / f"{row['diagram']}.json", "w") as f:
                json.dump(detail, f, indent=2)

    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    summary.to_csv(out_dir / "summary.csv", index=False)
    logger.info(f"Summary of {len(summary)} diagrams saved to {out_dir / 'summary.csv'}")
    return summary


if __name__ == "__main__":
    run_batch()
