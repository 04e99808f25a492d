"""Item-frequency statistics, distribution fitting, and band cleansing.

The cleansing pipeline is: count item frequencies, fit a lognormal or
exponential distribution to the (frequency, item count) marginal, derive the
retention band mu_hat +/- s*sigma_hat, delete every out-of-band item from
every transaction, then prune transactions left empty.

Fitting conventions:

* lognormal: mu_hat and sigma_hat are the population mean and standard
  deviation of ln(frequency) over items, each frequency value weighted by
  the number of items carrying it;
* exponential: the rate estimate is 1/mean(frequency), so mu_hat and
  sigma_hat are both the plain mean frequency.

The lognormal band is applied in log space (the fitted moments are moments
of ln x, so comparing raw frequencies against them would be dimensionally
inconsistent); a raw-space variant is available behind ``raw_band=True`` for
sensitivity experiments. The exponential band is applied in raw space with
the lower endpoint clamped at 0, which makes the low cut vacuous for s >= 1.
Items exactly on a band endpoint are retained.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .core import DatabaseBuilder, ItemId, TransactionDatabase

LOGNORMAL = "lognormal"
EXPONENTIAL = "exponential"
KINDS = (LOGNORMAL, EXPONENTIAL)

# (frequency value, number of items with that frequency)
MarginalPair = tuple[float, int]


@dataclass(frozen=True)
class FrequencyHistogram:
    """Per-item transaction-containment counts plus their marginal.

    ``marginal`` is sorted by frequency ascending with no duplicate
    frequency values; its counts sum to the number of distinct items.
    """

    per_item: dict[ItemId, int]
    marginal: tuple[MarginalPair, ...]

    @property
    def item_count(self) -> int:
        return len(self.per_item)

    @property
    def total_occurrences(self) -> int:
        return sum(f * k for f, k in self.marginal)


def item_frequencies(db: TransactionDatabase) -> FrequencyHistogram:
    """Count, for every item, the number of transactions containing it."""
    counts: Counter[ItemId] = Counter()
    for t in db.transactions:
        counts.update(t.items)
    marginal = tuple(sorted(Counter(counts.values()).items()))
    return FrequencyHistogram(per_item=dict(counts), marginal=marginal)


Marginal = Union[FrequencyHistogram, Sequence[MarginalPair]]


def _pairs(hist: Marginal) -> Sequence[MarginalPair]:
    if isinstance(hist, FrequencyHistogram):
        return hist.marginal
    return list(hist)


def fit_lognormal(hist: Marginal) -> tuple[float, float]:
    """Population mean and standard deviation of ln(frequency) over items.

    Accepts a histogram or raw (frequency, count) pairs; a frequency carried
    by k items contributes k terms to both moments.
    """
    pairs = _pairs(hist)
    n = sum(k for _, k in pairs)
    if n == 0:
        raise ValueError("no items to fit")
    mu = sum(k * math.log(f) for f, k in pairs) / n
    var = sum(k * (math.log(f) - mu) ** 2 for f, k in pairs) / n
    return mu, math.sqrt(var)


def fit_exponential(hist: Marginal) -> tuple[float, float]:
    """Exponential fit: rate = 1/mean(frequency), so mu_hat = sigma_hat = mean."""
    pairs = _pairs(hist)
    n = sum(k for _, k in pairs)
    if n == 0:
        raise ValueError("no items to fit")
    mean = sum(k * f for f, k in pairs) / n
    return mean, mean


def compute_bounds(
    kind: str,
    mu_hat: float,
    sigma_hat: float,
    s: float,
    raw_band: bool = False,
) -> tuple[float, float]:
    """Raw-space retention band endpoints for the fitted parameters.

    lognormal (default): the band lives in log space, so the endpoints are
    exp(mu_hat -/+ s*sigma_hat). With ``raw_band=True``, or for the
    exponential kind, the band is mu_hat -/+ s*sigma_hat in raw space with a
    negative lower endpoint clamped to 0.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown distribution kind {kind!r}")
    if s <= 0:
        raise ValueError("band multiplier s must be > 0")
    if sigma_hat < 0:
        raise ValueError("sigma_hat must be >= 0")
    lo = mu_hat - s * sigma_hat
    hi = mu_hat + s * sigma_hat
    if kind == LOGNORMAL and not raw_band:
        return math.exp(lo), math.exp(hi)
    return max(0.0, lo), hi


@dataclass(frozen=True)
class DistributionFit:
    """A fitted distribution and its derived retention band.

    ``lower``/``upper`` are raw-space endpoints for reporting; classification
    happens in log space when ``log_space`` is set, directly against
    mu_hat +/- s*sigma_hat, so band checks agree bit-for-bit with the fitted
    moments.
    """

    kind: str
    mu_hat: float
    sigma_hat: float
    s: float
    lower: float
    upper: float
    log_space: bool

    def classify(self, frequency: float) -> int:
        """-1 below the band, 0 inside or on a boundary, +1 above."""
        if self.log_space:
            value = math.log(frequency)
            lo = self.mu_hat - self.s * self.sigma_hat
            hi = self.mu_hat + self.s * self.sigma_hat
        else:
            value = float(frequency)
            lo = max(0.0, self.mu_hat - self.s * self.sigma_hat)
            hi = self.mu_hat + self.s * self.sigma_hat
        if value < lo:
            return -1
        if value > hi:
            return 1
        return 0

    def retains(self, frequency: float) -> bool:
        return self.classify(frequency) == 0


@dataclass(frozen=True)
class ManualBand:
    """Explicit raw-space retention band, for overrides and golden cases."""

    lower: float
    upper: float

    def classify(self, frequency: float) -> int:
        if frequency < self.lower:
            return -1
        if frequency > self.upper:
            return 1
        return 0

    def retains(self, frequency: float) -> bool:
        return self.classify(frequency) == 0


Band = Union[DistributionFit, ManualBand]


def fit_distribution(
    hist: Marginal,
    kind: str = LOGNORMAL,
    s: float = 5.0,
    raw_band: bool = False,
) -> DistributionFit:
    """Fit the requested distribution and attach its retention band."""
    if kind == LOGNORMAL:
        mu, sigma = fit_lognormal(hist)
    elif kind == EXPONENTIAL:
        mu, sigma = fit_exponential(hist)
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    lower, upper = compute_bounds(kind, mu, sigma, s, raw_band=raw_band)
    return DistributionFit(
        kind=kind,
        mu_hat=mu,
        sigma_hat=sigma,
        s=s,
        lower=lower,
        upper=upper,
        log_space=(kind == LOGNORMAL and not raw_band),
    )


def log_likelihood(hist: Marginal, kind: str) -> float | None:
    """Advisory goodness-of-fit: log-likelihood of the fitted distribution.

    Returns None when the likelihood is degenerate (zero-variance lognormal).
    Distribution choice stays with the caller; this is reporting only.
    """
    pairs = _pairs(hist)
    if kind == LOGNORMAL:
        mu, sigma = fit_lognormal(pairs)
        if sigma == 0.0:
            return None
        const = math.log(sigma * math.sqrt(2.0 * math.pi))
        return sum(
            k * (-math.log(f) - const - (math.log(f) - mu) ** 2 / (2.0 * sigma**2))
            for f, k in pairs
        )
    if kind == EXPONENTIAL:
        mean, _ = fit_exponential(pairs)
        rate = 1.0 / mean
        return sum(k * (math.log(rate) - rate * f) for f, k in pairs)
    raise ValueError(f"unknown distribution kind {kind!r}")


@dataclass(frozen=True)
class CleansingReport:
    """Outcome counts of one cleansing pass.

    Identities: items_removed_low + items_removed_high + items_retained
    equals the input item count, and transactions_removed_empty +
    transactions_retained equals the input transaction count. ``id_map``
    records surviving items' old id -> new compacted id.
    """

    items_removed_low: int
    items_removed_high: int
    items_retained: int
    transactions_removed_empty: int
    transactions_retained: int
    fit: Band
    id_map: dict[ItemId, ItemId] = field(repr=False, default_factory=dict)

    def to_json_dict(self) -> dict:
        fit = self.fit
        if isinstance(fit, DistributionFit):
            fit_json = {
                "kind": fit.kind,
                "mu_hat": fit.mu_hat,
                "sigma_hat": fit.sigma_hat,
                "s": fit.s,
                "lower": fit.lower,
                "upper": fit.upper,
                "log_space": fit.log_space,
            }
        else:
            fit_json = {"kind": "manual", "lower": fit.lower, "upper": fit.upper}
        return {
            "items_removed_low": self.items_removed_low,
            "items_removed_high": self.items_removed_high,
            "items_retained": self.items_retained,
            "transactions_removed_empty": self.transactions_removed_empty,
            "transactions_retained": self.transactions_retained,
            "fit": fit_json,
        }


def cleanse(
    db: TransactionDatabase,
    band: Band,
) -> tuple[TransactionDatabase, CleansingReport]:
    """Remove out-of-band items everywhere, then prune emptied transactions.

    Surviving transactions keep their relative order under fresh dense tids;
    the dictionary is compacted to surviving items (relative id order
    preserved) with the old->new mapping recorded on the report. Removing an
    item never changes another item's frequency, so a second cleanse with the
    same band is a no-op.
    """
    freq = item_frequencies(db).per_item
    verdict = {item: band.classify(f) for item, f in freq.items()}

    builder = DatabaseBuilder()
    removed_empty = 0
    for t in db.transactions:
        kept = [db.item_string(i) for i in t.items if verdict[i] == 0]
        if kept:
            builder.add(kept, label=t.label)
        else:
            removed_empty += 1
    cleansed = builder.build()

    id_map = {
        old: new
        for old, v in verdict.items()
        if v == 0 and (new := cleansed.dictionary.id_of(db.item_string(old))) is not None
    }
    report = CleansingReport(
        items_removed_low=sum(1 for v in verdict.values() if v < 0),
        items_removed_high=sum(1 for v in verdict.values() if v > 0),
        items_retained=sum(1 for v in verdict.values() if v == 0),
        transactions_removed_empty=removed_empty,
        transactions_retained=cleansed.n,
        fit=band,
        id_map=id_map,
    )
    return cleansed, report


def histogram_csv_lines(hist: FrequencyHistogram) -> Iterator[str]:
    """CSV export of the marginal: header then ``frequency,count`` ascending."""
    yield "frequency,count"
    for f, k in hist.marginal:
        yield f"{f},{k}"


def write_histogram_csv(hist: FrequencyHistogram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in histogram_csv_lines(hist):
            fh.write(line + "\n")


__all__ = [
    "LOGNORMAL",
    "EXPONENTIAL",
    "KINDS",
    "FrequencyHistogram",
    "item_frequencies",
    "fit_lognormal",
    "fit_exponential",
    "compute_bounds",
    "DistributionFit",
    "ManualBand",
    "Band",
    "fit_distribution",
    "log_likelihood",
    "CleansingReport",
    "cleanse",
    "histogram_csv_lines",
    "write_histogram_csv",
]
