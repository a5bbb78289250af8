"""Figure rendering for the command-line paths.

Every figure goes straight to a file through the Agg backend, so rendering
works on headless machines and never blocks on a display.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .simgen import METRICS


def plot_results(table, path):
    """Bar panels of mean +/- sd per estimator, one panel per metric."""
    estimators = []
    for row in table.rows:
        if row["estimator"] not in estimators:
            estimators.append(row["estimator"])
    fig, axes = plt.subplots(1, len(METRICS), figsize=(4 * len(METRICS), 3.5),
                             squeeze=False)
    for ax, metric in zip(axes[0], METRICS):
        means, sds = [], []
        for est in estimators:
            rows = [r for r in table.rows
                    if r["estimator"] == est and r["metric"] == metric]
            means.append(rows[0]["mean"] if rows else np.nan)
            sds.append(rows[0]["sd"] if rows else 0.0)
        x = np.arange(len(estimators))
        ax.bar(x, means, yerr=sds, capsize=3)
        ax.set_xticks(x)
        ax.set_xticklabels(estimators, rotation=30, ha="right", fontsize=8)
        ax.set_title(metric)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_predictors(U, y, path):
    """Response against each fitted sufficient predictor."""
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    d = U.shape[1]
    fig, axes = plt.subplots(1, d, figsize=(4.5 * d, 3.5), squeeze=False)
    for j, ax in enumerate(axes[0]):
        ax.scatter(U[:, j], y, s=8, alpha=0.6)
        ax.set_xlabel(f"predictor {j + 1}")
        ax.set_ylabel("response")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_eval(report, path):
    """Error and selection rates of one evaluated fit."""
    values = [report.error, report.fpr, report.fnr]
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ax.bar(np.arange(3), values)
    ax.set_xticks(np.arange(3))
    ax.set_xticklabels(["error", "fpr", "fnr"])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
