"""Bayesian summaries for survey responses.

Two posterior families are implemented:

* correctness questions: binomial likelihood for the number of correct
  selections with a Beta prior, so the posterior is Beta(a + k, b + n - k)
  in closed form;
* Likert questions: normal likelihood for the scores with a normal prior
  on the mean and a half-normal prior on the standard deviation. The
  marginal posterior of the mean is computed on a dense (mean, sd) grid;
  the contract is on the posterior itself, with grid error on interval
  endpoints kept well under 0.02.

Posteriors are summarized as credible intervals (default mass 0.94),
either highest-density or equal-tailed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar

from .errors import FormatError, InputError

DEFAULT_MASS = 0.94
KIND_HDI = "HDI"
KIND_EQUAL_TAILED = "EqualTailed"

# Weakly informative defaults. The Beta(1,1) prior is pinned by the
# correctness reproduction test; the Likert priors cover the 1..5 scale.
DEFAULT_BETA_PRIOR = (1.0, 1.0)
DEFAULT_LIKERT_PRIOR = {"mean_loc": 3.0, "mean_scale": 2.0, "sd_scale": 2.0}

MULTISELECT_WIDTH = 4


@dataclass(frozen=True)
class CredibleInterval:
    """Posterior summary: an interval holding ``mass`` probability."""

    mass: float
    low: float
    high: float
    mean: float
    kind: str = KIND_HDI

    def __post_init__(self):
        if not (0 < self.mass < 1):
            raise InputError(f"interval mass must be in (0,1), got {self.mass}")
        if not (self.low <= self.mean <= self.high):
            raise InputError(
                f"interval [{self.low}, {self.high}] does not bracket mean {self.mean}"
            )

    @property
    def width(self) -> float:
        return self.high - self.low

    def as_dict(self) -> dict:
        return {
            "mass": self.mass,
            "low": self.low,
            "high": self.high,
            "mean": self.mean,
            "kind": self.kind,
        }


def _beta_hdi(a: float, b: float, mass: float) -> tuple[float, float]:
    """Narrowest interval of mass ``mass`` under Beta(a, b).

    For a unimodal interior mode the HDI satisfies pdf(low) == pdf(high);
    it is found by minimizing the interval width over the lower endpoint.
    Boundary modes pin one endpoint at 0 or 1.
    """
    dist = stats.beta(a, b)
    if a <= 1.0 and b <= 1.0:
        # Flat or boundary-bimodal density: no unique narrowest interval;
        # fall back to the central interval.
        return _beta_equal_tailed(a, b, mass)
    if a <= 1.0:
        return 0.0, float(dist.ppf(mass))
    if b <= 1.0:
        return float(dist.ppf(1.0 - mass)), 1.0

    def width(low_q: float) -> float:
        low = dist.ppf(low_q)
        high = dist.ppf(low_q + mass)
        return high - low

    res = minimize_scalar(
        width, bounds=(1e-12, 1.0 - mass - 1e-12), method="bounded",
        options={"xatol": 1e-12},
    )
    low_q = float(res.x)
    return float(dist.ppf(low_q)), float(dist.ppf(low_q + mass))


def _beta_equal_tailed(a: float, b: float, mass: float) -> tuple[float, float]:
    tail = (1.0 - mass) / 2.0
    dist = stats.beta(a, b)
    return float(dist.ppf(tail)), float(dist.ppf(1.0 - tail))


def beta_interval(a: float, b: float, mass: float = DEFAULT_MASS,
                  kind: str = KIND_HDI) -> CredibleInterval:
    """Credible interval of a Beta(a, b) distribution."""
    if a <= 0 or b <= 0:
        raise InputError(f"Beta parameters must be positive, got ({a}, {b})")
    if kind == KIND_HDI:
        low, high = _beta_hdi(a, b, mass)
    elif kind == KIND_EQUAL_TAILED:
        low, high = _beta_equal_tailed(a, b, mass)
    else:
        raise InputError(f"unknown interval kind {kind!r}")
    mean = a / (a + b)
    # Guard against round-off placing the mean a hair outside the interval
    # in extreme-skew cases.
    low = min(low, mean)
    high = max(high, mean)
    return CredibleInterval(mass=mass, low=low, high=high, mean=mean, kind=kind)


def correctness_ci(n_correct: int, n_trials: int,
                   prior_a: float = DEFAULT_BETA_PRIOR[0],
                   prior_b: float = DEFAULT_BETA_PRIOR[1],
                   mass: float = DEFAULT_MASS,
                   kind: str = KIND_HDI) -> CredibleInterval:
    """Posterior interval for the probability of a correct response."""
    if n_trials < 1:
        raise InputError("n_trials must be >= 1")
    if not (0 <= n_correct <= n_trials):
        raise InputError(
            f"n_correct must lie in [0, n_trials], got {n_correct}/{n_trials}"
        )
    if prior_a <= 0 or prior_b <= 0:
        raise InputError("Beta prior parameters must be positive")
    return beta_interval(prior_a + n_correct, prior_b + (n_trials - n_correct),
                         mass=mass, kind=kind)


def multiselect_trials(responses) -> tuple[int, int]:
    """Reduce per-participant binary vectors (length 4) to (correct, trials)."""
    n_correct = 0
    n_trials = 0
    for row_no, vec in enumerate(responses):
        vec = list(vec)
        if len(vec) != MULTISELECT_WIDTH:
            raise InputError(
                f"participant {row_no}: expected {MULTISELECT_WIDTH} binary "
                f"entries, got {len(vec)}"
            )
        if any(v not in (0, 1) for v in vec):
            raise InputError(f"participant {row_no}: entries must be 0 or 1")
        n_correct += sum(vec)
        n_trials += MULTISELECT_WIDTH
    return n_correct, n_trials


def likert_mean_ci(scores,
                   prior_mean_loc: float = DEFAULT_LIKERT_PRIOR["mean_loc"],
                   prior_mean_scale: float = DEFAULT_LIKERT_PRIOR["mean_scale"],
                   prior_sd_scale: float = DEFAULT_LIKERT_PRIOR["sd_scale"],
                   mass: float = DEFAULT_MASS,
                   kind: str = KIND_HDI) -> CredibleInterval:
    """Marginal posterior interval for the mean of Likert scores.

    Likelihood: scores ~ Normal(mu, sd); priors mu ~ Normal(loc, scale),
    sd ~ HalfNormal(sd_scale). The (mu, sd) posterior is evaluated on a
    dense grid and marginalized over sd with trapezoid weights.
    """
    x = np.asarray(list(scores), dtype=np.float64)
    if x.size < 2:
        raise InputError("need at least 2 scores")
    if not np.all(np.isfinite(x)):
        raise InputError("scores must be finite")
    if np.any(x < 1.0) or np.any(x > 5.0):
        raise InputError("scores must lie in [1, 5]")
    if prior_mean_scale <= 0 or prior_sd_scale <= 0:
        raise InputError("prior scales must be positive")

    n = x.size
    xbar = float(x.mean())
    s2 = float(np.mean((x - xbar) ** 2))
    s = math.sqrt(s2)

    # Grid ranges adapt to the data so degenerate samples (s == 0) still
    # resolve; the prior pull is tiny for n >= 2 but harmless to include.
    half = max(10.0 * s / math.sqrt(n), 0.25)
    mu = np.linspace(xbar - half, xbar + half, 3001)
    sd_hi = max(4.0 * s, 1.0)
    sd = np.geomspace(max(s / 50.0, 1e-4), sd_hi, 800)

    # log posterior on the (sd, mu) grid, up to a constant
    mu_col = mu[None, :]
    sd_col = sd[:, None]
    sse = n * s2 + n * (mu_col - xbar) ** 2
    log_lik = -n * np.log(sd_col) - sse / (2.0 * sd_col ** 2)
    log_prior_mu = -0.5 * ((mu_col - prior_mean_loc) / prior_mean_scale) ** 2
    log_prior_sd = -0.5 * (sd_col / prior_sd_scale) ** 2
    log_post = log_lik + log_prior_mu + log_prior_sd
    log_post -= log_post.max()
    post = np.exp(log_post)

    # Trapezoid weights over the (geometric) sd axis, then a normalized
    # density over mu.
    sd_w = np.empty_like(sd)
    sd_w[1:-1] = (sd[2:] - sd[:-2]) / 2.0
    sd_w[0] = (sd[1] - sd[0]) / 2.0
    sd_w[-1] = (sd[-1] - sd[-2]) / 2.0
    density = sd_w @ post
    total = np.trapezoid(density, mu)
    if total <= 0 or not np.isfinite(total):
        raise InputError("posterior mass vanished on the evaluation grid")
    density /= total

    mean = float(np.trapezoid(mu * density, mu))
    cdf = np.concatenate([[0.0], np.cumsum((density[1:] + density[:-1]) / 2.0 * np.diff(mu))])
    cdf /= cdf[-1]

    def ppf(q: float) -> float:
        return float(np.interp(q, cdf, mu))

    if kind == KIND_EQUAL_TAILED:
        tail = (1.0 - mass) / 2.0
        low, high = ppf(tail), ppf(1.0 - tail)
    elif kind == KIND_HDI:
        res = minimize_scalar(
            lambda q: ppf(q + mass) - ppf(q),
            bounds=(1e-9, 1.0 - mass - 1e-9), method="bounded",
            options={"xatol": 1e-10},
        )
        low, high = ppf(float(res.x)), ppf(float(res.x) + mass)
    else:
        raise InputError(f"unknown interval kind {kind!r}")

    low = min(low, mean)
    high = max(high, mean)
    return CredibleInterval(mass=mass, low=low, high=high, mean=mean, kind=kind)


# ---------------------------------------------------------------------------
# Response-file handling
# ---------------------------------------------------------------------------

# question_code -> (kind, short label). Kinds: "binary" (single correct/
# incorrect selection), "multiselect4" (4 binary digits per participant),
# "likert" (score 1..5). "idk" responses are excluded at load time with an
# explicit count.
QUESTION_CATALOG = {
    "Q2.1": ("binary", "Meaning of the headline percentage"),
    "Q2.2": ("binary", "Most-appearing gender, film 1"),
    "Q2.3": ("binary", "Most-appearing age band, film 2"),
    "Q2.4": ("binary", "Least-appearing intersection, film 3"),
    "Q2.5": ("binary", "Fair over-50 representation"),
    "Q2.6": ("binary", "Favours female over-50"),
    "Q2.7": ("binary", "Highest age confidence"),
    "Q2.8": ("multiselect4", "Under-detected categories"),
    "Q2.9": ("likert", "Trust in gender predictions"),
    "Q2.10": ("likert", "Trust in age predictions"),
    "Q3.1": ("likert", "Usefulness of doughnut charts"),
    "Q3.2": ("likert", "Usefulness of intersection view"),
    "Q3.3": ("likert", "Usefulness of AI in this context"),
    "Q3.4": ("likert", "Usefulness of confidence info"),
    "Q3.5": ("likert", "Usefulness of bias info"),
    "Q3.6": ("likert", "Cognitive load"),
    "Q3.7": ("likert", "Frustration"),
    "Q3.8": ("likert", "Tool rating"),
    "Q3.9": ("likert", "Liking of the tool"),
}

GROUPS = {
    "Q2.1": "understandability", "Q2.2": "understandability",
    "Q2.3": "understandability", "Q2.4": "understandability",
    "Q2.5": "understandability", "Q2.6": "understandability",
    "Q2.7": "understandability", "Q2.8": "understandability",
    "Q2.9": "trust", "Q2.10": "trust",
    "Q3.1": "usefulness", "Q3.2": "usefulness", "Q3.3": "usefulness",
    "Q3.4": "usefulness", "Q3.5": "usefulness",
    "Q3.6": "user experience", "Q3.7": "user experience",
    "Q3.8": "user experience", "Q3.9": "user experience",
}

IDK = "idk"


def load_responses(csv_path) -> dict[str, list[tuple[str, str]]]:
    """Read the anonymized response CSV into question -> [(participant, response)].

    Required columns: participant_id, question_code, response.
    """
    csv_path = Path(csv_path)
    by_question: dict[str, list[tuple[str, str]]] = {}
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"participant_id", "question_code", "response"}
        header = set(reader.fieldnames or [])
        missing = required - header
        if missing:
            raise FormatError(
                f"{csv_path}: missing column(s) {', '.join(sorted(missing))}"
            )
        n_rows = 0
        for row_no, row in enumerate(reader, start=2):
            code = row["question_code"].strip()
            if code not in QUESTION_CATALOG:
                raise FormatError(f"{csv_path}:{row_no}: unknown question code {code!r}")
            by_question.setdefault(code, []).append(
                (row["participant_id"].strip(), row["response"].strip())
            )
            n_rows += 1
    if n_rows == 0:
        raise InputError(f"{csv_path}: no responses found")
    return by_question


def _parse_binary(code, entries):
    values, excluded = [], 0
    for participant, resp in entries:
        if resp.lower() == IDK:
            excluded += 1
        elif resp in ("0", "1"):
            values.append(int(resp))
        else:
            raise FormatError(
                f"{code}: participant {participant}: expected 0, 1 or idk, got {resp!r}"
            )
    return values, excluded


def _parse_multiselect(code, entries):
    vectors, excluded = [], 0
    for participant, resp in entries:
        if resp.lower() == IDK:
            excluded += 1
        elif len(resp) == MULTISELECT_WIDTH and set(resp) <= {"0", "1"}:
            vectors.append([int(c) for c in resp])
        else:
            raise FormatError(
                f"{code}: participant {participant}: expected {MULTISELECT_WIDTH} "
                f"binary digits or idk, got {resp!r}"
            )
    return vectors, excluded


def _parse_likert(code, entries):
    scores, excluded = [], 0
    for participant, resp in entries:
        if resp.lower() == IDK:
            excluded += 1
            continue
        try:
            score = float(resp)
        except ValueError:
            raise FormatError(
                f"{code}: participant {participant}: expected a 1..5 score, got {resp!r}"
            ) from None
        if not (1.0 <= score <= 5.0):
            raise FormatError(
                f"{code}: participant {participant}: score {score} outside [1, 5]"
            )
        scores.append(score)
    return scores, excluded


def analyze_survey(csv_path, mass: float = DEFAULT_MASS, kind: str = KIND_HDI,
                   prior_a: float = DEFAULT_BETA_PRIOR[0],
                   prior_b: float = DEFAULT_BETA_PRIOR[1],
                   likert_priors: dict | None = None) -> dict:
    """Per-question credible intervals for a full response file."""
    likert_priors = {**DEFAULT_LIKERT_PRIOR, **(likert_priors or {})}
    by_question = load_responses(csv_path)
    questions = []
    for code in sorted(by_question, key=_question_sort_key):
        q_kind, label = QUESTION_CATALOG[code]
        entries = by_question[code]
        record = {
            "code": code,
            "label": label,
            "kind": q_kind,
            "group": GROUPS[code],
            "n_responses": len(entries),
        }
        if q_kind == "binary":
            values, excluded = _parse_binary(code, entries)
            record.update(n_excluded_idk=excluded, n_eff=len(values))
            if values:
                record["n_correct"] = sum(values)
                record["interval"] = correctness_ci(
                    sum(values), len(values), prior_a, prior_b, mass, kind
                ).as_dict()
                record["priors"] = {"beta_a": prior_a, "beta_b": prior_b}
        elif q_kind == "multiselect4":
            vectors, excluded = _parse_multiselect(code, entries)
            n_correct, n_trials = multiselect_trials(vectors)
            record.update(n_excluded_idk=excluded, n_eff=len(vectors),
                          n_correct=n_correct, n_trials=n_trials)
            if n_trials:
                record["interval"] = correctness_ci(
                    n_correct, n_trials, prior_a, prior_b, mass, kind
                ).as_dict()
                record["priors"] = {"beta_a": prior_a, "beta_b": prior_b}
        else:
            scores, excluded = _parse_likert(code, entries)
            record.update(n_excluded_idk=excluded, n_eff=len(scores))
            if len(scores) >= 2:
                record["interval"] = likert_mean_ci(
                    scores,
                    prior_mean_loc=likert_priors["mean_loc"],
                    prior_mean_scale=likert_priors["mean_scale"],
                    prior_sd_scale=likert_priors["sd_scale"],
                    mass=mass, kind=kind,
                ).as_dict()
                record["priors"] = dict(likert_priors)
        if "interval" not in record:
            record["excluded"] = True
        questions.append(record)
    fingerprint = hashlib.sha256(json.dumps(
        {"mass": mass, "kind": kind, "beta": [prior_a, prior_b],
         "likert": likert_priors}, sort_keys=True).encode()).hexdigest()[:16]
    return {"schema_version": 1, "mass": mass, "interval_kind": kind,
            "config_fingerprint": fingerprint, "questions": questions}


def _question_sort_key(code: str):
    part, num = code[1:].split(".")
    return int(part), int(num)
