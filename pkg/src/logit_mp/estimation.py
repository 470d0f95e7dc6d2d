"""
Structure selection and maximum-likelihood fitting of Logit-MP utilities.

Bundle utilities follow the linear specification

    u_e = sum_{i in e} alpha_i + sum_{i<j in e} beta_ij,
    alpha_i = sum_j eta_j h_ij + eta_r r_i,

so the log-likelihood is concave in (eta, eta_r, beta) and is maximized with
scipy's trust-region solver using the exact gradient and Hessian.

Example:
    data = TransactionData.from_csv("sales.csv", "products.csv")
    structure = build_candidate_hypergraph(data, d=2, theta=0.1)
    params, ll = fit_mle(data, structure)
    hypergraph = structure.to_hypergraph(params)
"""

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize
from scipy.special import logsumexp

from .constants import MLE_GRAD_TOL, MLE_MAX_ITERS, MLE_PARAM_NORM_GUARD
from .errors import (
    DegenerateFold,
    InvalidInput,
    LogitMPError,
    NoTransactions,
    NotConverged,
    ParseError,
    PerfectSeparation,
)
from .hypergraph import Bundle, Hypergraph
from .instances import make_rng
from .log import Log

OUTSIDE = "0"

TRANSACTION_COLUMNS = ("period", "bundle", "count")
PRODUCT_COLUMNS = ("product", "category", "price")
ASSORTMENT_COLUMNS = ("period", "items")

Pair = Tuple[int, int]


def parse_bundle(text: str) -> Optional[Bundle]:
    """'1;3' -> {1,3}; the outside option '0' -> None"""
    text = str(text).strip()
    if text == OUTSIDE:
        return None
    try:
        return Bundle(tuple(int(part) for part in text.split(";")))
    except (ValueError, LogitMPError) as e:
        raise ParseError(f"Cannot parse bundle {text!r}") from e


def format_bundle(bundle: Optional[Bundle]) -> str:
    return OUTSIDE if bundle is None else ";".join(str(i) for i in bundle)


def _require_columns(frame: pd.DataFrame, columns: Sequence[str], what: str) -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ParseError(f"{what} is missing columns {missing}")


# Data


@dataclass
class TransactionData:
    """
    Sales per period.

    Attributes:
        num_products: Number of products N
        periods: Period labels
        assortments: Offered item set S_t per period
        sales: Counts n_te per purchased bundle per period
        outside: No-purchase counts n_t0 per period
        categories: Category of each product
        prices: Price r_i of each product
    """

    num_products: int
    periods: List[int]
    assortments: List[FrozenSet[int]]
    sales: List[Dict[Bundle, int]]
    outside: List[int]
    categories: Dict[int, int]
    prices: Dict[int, float]

    def __post_init__(self):
        if not len(self.periods) == len(self.assortments) == len(self.sales) == len(self.outside):
            raise InvalidInput("Per-period fields have different lengths")
        for t, period in enumerate(self.periods):
            if self.outside[t] < 0:
                raise InvalidInput(f"Period {period} has a negative outside count")
            for bundle, count in self.sales[t].items():
                if count < 0:
                    raise InvalidInput(f"Period {period} has a negative count for {bundle}")
                if not bundle.issubset(self.assortments[t]):
                    raise InvalidInput(f"Period {period} sells {bundle} outside its assortment")
        for i in range(1, self.num_products + 1):
            if i not in self.categories or i not in self.prices:
                raise InvalidInput(f"Product {i} has no attributes")

    @property
    def num_periods(self) -> int:
        return len(self.periods)

    def total(self) -> int:
        return int(sum(self.outside) + sum(sum(s.values()) for s in self.sales))

    def bundle_totals(self) -> Counter:
        totals: Counter = Counter()
        for sales in self.sales:
            totals.update(sales)
        return totals

    def subset(self, indices: Sequence[int]) -> "TransactionData":
        return TransactionData(
            self.num_products,
            [self.periods[t] for t in indices],
            [self.assortments[t] for t in indices],
            [dict(self.sales[t]) for t in indices],
            [self.outside[t] for t in indices],
            self.categories,
            self.prices,
        )

    @classmethod
    def from_frames(
        cls,
        transactions: pd.DataFrame,
        products: pd.DataFrame,
        assortments: Optional[pd.DataFrame] = None,
    ) -> "TransactionData":
        """
        Build from long-form frames.

        transactions has columns period, bundle, count (bundle "0" is the
        outside option); products has product, category, price; the optional
        assortments frame has period, items. Without it, S_t is the set of
        items sold in period t.

        Raises:
            ParseError: On missing columns, a period without an outside row,
                or products not numbered 1..N
            NoTransactions: If the transactions frame is empty
        """
        _require_columns(transactions, TRANSACTION_COLUMNS, "Transactions")
        _require_columns(products, PRODUCT_COLUMNS, "Products")
        if transactions.empty:
            raise NoTransactions("No transactions given")

        ids = sorted(int(p) for p in products["product"])
        if ids != list(range(1, len(ids) + 1)):
            raise ParseError("Products must be numbered 1..N without gaps")
        labels = {label: k for k, label in enumerate(sorted({str(c) for c in products["category"]}))}
        categories, prices = {}, {}
        for product, category, price in products[list(PRODUCT_COLUMNS)].itertuples(index=False, name=None):
            categories[int(product)] = labels[str(category)]
            prices[int(product)] = float(price)

        offered: Dict[int, FrozenSet[int]] = {}
        if assortments is not None:
            _require_columns(assortments, ASSORTMENT_COLUMNS, "Assortments")
            for period, text in assortments[list(ASSORTMENT_COLUMNS)].itertuples(index=False, name=None):
                items = parse_bundle(text)
                offered[int(period)] = frozenset() if items is None else items.item_set

        periods: List[int] = []
        sales: List[Dict[Bundle, int]] = []
        outside: List[int] = []
        for period, group in transactions.groupby("period", sort=True):
            counts: Dict[Bundle, int] = {}
            n0 = None
            for text, count in group[["bundle", "count"]].itertuples(index=False, name=None):
                bundle = parse_bundle(text)
                if bundle is None:
                    n0 = (n0 or 0) + int(count)
                else:
                    counts[bundle] = counts.get(bundle, 0) + int(count)
            if n0 is None:
                raise ParseError(f"Period {period} has no outside-option count")
            periods.append(int(period))
            sales.append(counts)
            outside.append(n0)

        chosen = []
        for period, counts in zip(periods, sales):
            if assortments is not None:
                if period not in offered:
                    raise ParseError(f"Period {period} has no assortment row")
                chosen.append(offered[period])
            else:
                chosen.append(frozenset(i for bundle in counts for i in bundle))
        return cls(len(ids), periods, chosen, sales, outside, categories, prices)

    @classmethod
    def from_csv(cls, transactions, products, assortments=None) -> "TransactionData":
        try:
            frames = [pd.read_csv(transactions, dtype={"bundle": str}), pd.read_csv(products)]
            offered = None if assortments is None else pd.read_csv(assortments, dtype={"items": str})
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ParseError(f"Cannot read CSV input: {e}") from e
        return cls.from_frames(frames[0], frames[1], offered)

    def to_frames(self) -> Tuple[pd.DataFrame, pd.DataFrame, pd.DataFrame]:
        rows = []
        for period, sales, n0 in zip(self.periods, self.sales, self.outside):
            rows.append((period, OUTSIDE, n0))
            rows += [(period, format_bundle(b), c) for b, c in sorted(sales.items())]
        transactions = pd.DataFrame(rows, columns=list(TRANSACTION_COLUMNS))
        products = pd.DataFrame(
            [(i, self.categories[i], self.prices[i]) for i in range(1, self.num_products + 1)],
            columns=list(PRODUCT_COLUMNS),
        )
        assortments = pd.DataFrame(
            [(p, ";".join(str(i) for i in sorted(s))) for p, s in zip(self.periods, self.assortments)],
            columns=list(ASSORTMENT_COLUMNS),
        )
        return transactions, products, assortments

    def to_csv(self, directory) -> Tuple[Path, Path, Path]:
        """Write transactions.csv, products.csv and assortments.csv into directory"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = (directory / "transactions.csv", directory / "products.csv", directory / "assortments.csv")
        for frame, path in zip(self.to_frames(), paths):
            frame.to_csv(path, index=False)
        return paths


def simulate_transactions(
    hypergraph: Hypergraph,
    periods: int,
    per_period: int,
    seed: int = 0,
    offer_prob: float = 0.7,
    categories: Optional[Dict[int, int]] = None,
    prices: Optional[Dict[int, float]] = None,
) -> TransactionData:
    """
    Multinomial sales drawn from a known Logit-MP model.

    Each period offers every product independently with probability
    offer_prob (redrawn while empty) and draws per_period choices among the
    outside option and the available bundles.
    """
    if periods < 1 or per_period < 1:
        raise InvalidInput("periods and per_period must be >= 1")
    if not 0.0 < offer_prob <= 1.0:
        raise InvalidInput(f"offer_prob must lie in (0, 1], got {offer_prob}")
    rng = make_rng(seed)
    n = hypergraph.num_products
    categories = categories or {i: 0 for i in hypergraph.products}
    prices = prices or {i: hypergraph.revenue(Bundle((i,))) for i in hypergraph.products}

    assortments, sales, outside = [], [], []
    for _ in range(periods):
        offered = np.flatnonzero(rng.random(n) < offer_prob) + 1
        while offered.size == 0:
            offered = np.flatnonzero(rng.random(n) < offer_prob) + 1
        S = frozenset(int(i) for i in offered)
        available = [e for e in hypergraph.edges if e.issubset(S)]
        weights = np.array([1.0] + [hypergraph.attraction(e) for e in available])
        draws = rng.multinomial(per_period, weights / weights.sum())
        assortments.append(S)
        outside.append(int(draws[0]))
        sales.append({e: int(c) for e, c in zip(available, draws[1:]) if c > 0})
    return TransactionData(n, list(range(1, periods + 1)), assortments, sales, outside, categories, prices)


# Structure


@dataclass(frozen=True)
class Structure:
    """Bundle structure E_{d,theta} without utilities"""

    num_products: int
    bundles: Tuple[Bundle, ...]
    d: int = 1
    theta: float = 1.0

    @property
    def edges(self) -> List[Bundle]:
        return [Bundle((i,)) for i in range(1, self.num_products + 1)] + list(self.bundles)

    def pairs(self) -> List[Pair]:
        return sorted({p for e in self.bundles for p in itertools.combinations(e.items, 2)})

    def to_hypergraph(self, params: "UtilityParams", prices: Optional[Dict[int, float]] = None) -> Hypergraph:
        """Instance with v = exp(fitted u) and revenues additive in prices"""
        prices = prices or params.prices
        edges = [(e, params.utility(e), sum(prices[i] for i in e)) for e in self.edges]
        return Hypergraph.from_utilities(self.num_products, edges)


def _candidates(n: int, d: int) -> Iterator[Bundle]:
    for size in range(2, d + 1):
        for items in itertools.combinations(range(1, n + 1), size):
            yield Bundle(items)


def build_candidate_hypergraph(data: TransactionData, d: int, theta: float) -> Structure:
    """
    Keep the ceil(theta |E_d \\ V|) multi-item bundles of size <= d with the
    largest total sales; ties and zero-sale fill-ins follow canonical order.

    Raises:
        NoTransactions: If the data holds no transactions
    """
    if d < 1:
        raise InvalidInput(f"d must be >= 1, got {d}")
    if not 0.0 < theta <= 1.0:
        raise InvalidInput(f"theta must lie in (0, 1], got {theta}")
    if data.num_periods == 0 or data.total() == 0:
        raise NoTransactions("No transactions to build a structure from")

    n = data.num_products
    pool = sum(math.comb(n, s) for s in range(2, min(d, n) + 1))
    keep = int(math.ceil(theta * pool - 1e-9))

    totals = data.bundle_totals()
    observed = sorted(
        (e for e, c in totals.items() if 2 <= len(e) <= d and c > 0),
        key=lambda e: (-totals[e], e.sort_key),
    )
    chosen = observed[:keep]
    if len(chosen) < keep:
        taken = set(chosen)
        for e in _candidates(n, d):
            if len(chosen) >= keep:
                break
            if e not in taken:
                chosen.append(e)
    return Structure(n, tuple(sorted(chosen)), d, theta)


def restrict_to_offered(structure: Structure, data: TransactionData) -> Structure:
    """Drop bundles that no period offers; their utilities cannot be fitted"""
    offered = [e for e in structure.bundles if any(e.issubset(S) for S in data.assortments)]
    return Structure(structure.num_products, tuple(offered), structure.d, structure.theta)


# Utilities


@dataclass(frozen=True)
class UtilitySpec:
    """
    Free parameters of the linear utility.

    item_effects replaces the category effects by one alpha_i per product
    and cannot be combined with a price coefficient.
    """

    category_effects: bool = True
    price: bool = True
    interactions: bool = True
    item_effects: bool = False

    def __post_init__(self):
        if self.item_effects and self.price:
            raise InvalidInput("Item effects and a price coefficient are not jointly identified")


@dataclass
class UtilityParams:
    eta: Dict[int, float] = field(default_factory=dict)
    eta_r: float = 0.0
    beta: Dict[Pair, float] = field(default_factory=dict)
    item: Dict[int, float] = field(default_factory=dict)
    categories: Dict[int, int] = field(default_factory=dict)
    prices: Dict[int, float] = field(default_factory=dict)

    def alpha(self, i: int) -> float:
        if self.item:
            return self.item.get(i, 0.0)
        return self.eta.get(self.categories.get(i, 0), 0.0) + self.eta_r * self.prices.get(i, 0.0)

    def utility(self, bundle: Bundle) -> float:
        return sum(self.alpha(i) for i in bundle) + sum(
            self.beta.get(p, 0.0) for p in itertools.combinations(bundle.items, 2)
        )


class LikelihoodModel:
    """
    Design matrix and sufficient statistics of one (data, structure) pair.

    Bundles that are not in the structure are dropped from the likelihood
    counts; the outside count of every period is kept. Their per-period
    total is kept in `unmodeled` so predictions can be scored against the
    whole market.
    """

    def __init__(self, data: TransactionData, structure: Structure, spec: Optional[UtilitySpec] = None):
        self.data = data
        self.structure = structure
        self.spec = spec or UtilitySpec()
        self.edges = structure.edges
        self.names: List[str] = []
        self.design = self._design()

        index = {e: k for k, e in enumerate(self.edges)}
        T, E = data.num_periods, len(self.edges)
        self.available = np.zeros((T, E), dtype=bool)
        self.counts = np.zeros((T, E))
        self.unmodeled = np.zeros(T)
        for t in range(T):
            S = data.assortments[t]
            for k, e in enumerate(self.edges):
                self.available[t, k] = e.issubset(S)
            for bundle, c in data.sales[t].items():
                if bundle in index:
                    self.counts[t, index[bundle]] += c
                else:
                    self.unmodeled[t] += c
        self.outside = np.asarray(data.outside, dtype=float)
        self.totals = self.outside + self.counts.sum(axis=1)
        self.market = self.totals + self.unmodeled
        self.num_obs = float(self.totals.sum())

    def _design(self) -> np.ndarray:
        spec, data = self.spec, self.data
        columns: List[np.ndarray] = []
        if spec.item_effects:
            for i in range(1, data.num_products + 1):
                columns.append(np.array([1.0 if i in e else 0.0 for e in self.edges]))
                self.names.append(f"alpha_{i}")
        elif spec.category_effects:
            for c in sorted(set(data.categories.values())):
                columns.append(np.array([sum(data.categories[i] == c for i in e) for e in self.edges], dtype=float))
                self.names.append(f"eta_{c}")
        if spec.price:
            columns.append(np.array([sum(data.prices[i] for i in e) for e in self.edges]))
            self.names.append("eta_r")
        if spec.interactions:
            for pair in self.structure.pairs():
                columns.append(np.array([1.0 if set(pair) <= e.item_set else 0.0 for e in self.edges]))
                self.names.append(f"beta_{pair[0]}_{pair[1]}")
        if not columns:
            raise InvalidInput("The utility specification has no free parameters")
        return np.column_stack(columns)

    @property
    def num_params(self) -> int:
        return self.design.shape[1]

    def utilities(self, theta: np.ndarray) -> np.ndarray:
        return self.design @ theta

    def probabilities(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(P over bundles (T x E), P of the outside option (T,))"""
        u = np.where(self.available, self.utilities(theta)[None, :], -np.inf)
        log_z = logsumexp(np.hstack([np.zeros((u.shape[0], 1)), u]), axis=1)
        return np.exp(u - log_z[:, None]), np.exp(-log_z)

    def log_likelihood(self, theta: np.ndarray) -> Tuple[float, np.ndarray]:
        """Total log-likelihood and its gradient"""
        u = self.utilities(theta)
        masked = np.where(self.available, u[None, :], -np.inf)
        log_z = logsumexp(np.hstack([np.zeros((masked.shape[0], 1)), masked]), axis=1)
        P = np.exp(masked - log_z[:, None])
        value = float((self.counts * np.where(self.available, u[None, :], 0.0)).sum() - self.totals @ log_z)
        gradient = self.design.T @ (self.counts.sum(axis=0) - (self.totals[:, None] * P).sum(axis=0))
        return value, gradient

    def hessian(self, theta: np.ndarray) -> np.ndarray:
        P, _ = self.probabilities(theta)
        mean = P @ self.design
        weighted = (self.totals[:, None] * P).sum(axis=0)
        return -(self.design.T @ (weighted[:, None] * self.design) - mean.T @ (self.totals[:, None] * mean))

    def params(self, theta: np.ndarray) -> UtilityParams:
        params = UtilityParams(categories=dict(self.data.categories), prices=dict(self.data.prices))
        for name, value in zip(self.names, theta):
            kind, _, rest = name.partition("_")
            if kind == "alpha":
                params.item[int(rest)] = float(value)
            elif kind == "eta" and rest == "r":
                params.eta_r = float(value)
            elif kind == "eta":
                params.eta[int(rest)] = float(value)
            else:
                a, b = rest.split("_")
                params.beta[(int(a), int(b))] = float(value)
        return params


def log_likelihood(
    theta: np.ndarray, data: TransactionData, structure: Structure, spec: Optional[UtilitySpec] = None
) -> Tuple[float, np.ndarray]:
    return LikelihoodModel(data, structure, spec).log_likelihood(np.asarray(theta, dtype=float))


def fit_mle(
    data: TransactionData,
    structure: Structure,
    spec: Optional[UtilitySpec] = None,
    max_iters: int = MLE_MAX_ITERS,
    grad_tol: float = MLE_GRAD_TOL,
) -> Tuple[UtilityParams, float]:
    """
    Maximize the log-likelihood over the free linear parameters.

    Convergence is declared when the infinity norm of the per-transaction
    gradient drops below grad_tol.

    Returns:
        Fitted parameters and the final total log-likelihood

    Raises:
        NoTransactions: If the data holds no transactions
        PerfectSeparation: If no period records an outside choice, or the
            parameters run past the norm guard
        NotConverged: If the optimizer stops before the gradient tolerance
    """
    if data.num_periods == 0 or data.total() == 0:
        raise NoTransactions("No transactions to fit")
    if sum(data.outside) == 0:
        raise PerfectSeparation("No outside-option choices; utilities are unbounded")
    model = LikelihoodModel(data, structure, spec)
    never = [e for k, e in enumerate(model.edges) if len(e) > 1 and not model.available[:, k].any()]
    if never:
        raise InvalidInput(f"Bundles {never} are never offered together")

    scale = 1.0 / model.num_obs

    def objective(theta):
        value, gradient = model.log_likelihood(theta)
        return -value * scale, -gradient * scale

    result = minimize(
        objective,
        np.zeros(model.num_params),
        jac=True,
        hess=lambda theta: -model.hessian(theta) * scale,
        method="trust-exact",
        options={"gtol": grad_tol, "maxiter": max_iters},
    )
    theta = result.x
    if np.max(np.abs(theta)) > MLE_PARAM_NORM_GUARD:
        raise PerfectSeparation(f"Parameter norm {np.max(np.abs(theta)):.1f} exceeds {MLE_PARAM_NORM_GUARD}")
    value, gradient = model.log_likelihood(theta)
    if np.max(np.abs(gradient)) * scale >= grad_tol and not result.success:
        raise NotConverged(f"MLE stopped after {result.nit} iterations: {result.message}")

    Log.event(
        "mle_fitted",
        {"d": structure.d, "theta": structure.theta, "params": model.num_params, "log_likelihood": value},
    )
    return model.params(theta), value


# Cross-validation


@dataclass
class FoldScore:
    chi2: float
    mse: float
    skipped: int


def evaluate_shares(model: LikelihoodModel, theta: np.ndarray) -> FoldScore:
    """
    chi^2 and MSE between observed and predicted per-period shares.

    Observed shares are taken over every transaction of the period. Cells are
    the outside option, the modeled bundles on offer and one residual cell
    for purchases of bundles the structure does not model, which the model
    predicts with share 0. Both measures are sums over periods and cells.
    Cells with observed share 0 are left out of chi^2.
    """
    P, P0 = model.probabilities(theta)
    market = np.maximum(model.market, 1.0)[:, None]
    observed = np.hstack([model.outside[:, None], model.counts, model.unmodeled[:, None]]) / market
    predicted = np.hstack([P0[:, None], P, np.zeros((P.shape[0], 1))])
    cells = np.hstack(
        [np.ones((P.shape[0], 1), dtype=bool), model.available, (model.unmodeled > 0)[:, None]]
    ) & (model.market > 0)[:, None]

    diff = (observed - predicted)[cells]
    p = observed[cells]
    positive = p > 0
    chi2 = float(np.sum(diff[positive] ** 2 / p[positive]))
    mse = float(np.sum(diff**2))
    return FoldScore(chi2, mse, int(np.count_nonzero(~positive)))


def _fold_indices(num_periods: int, folds: int, seed: Optional[int] = None) -> List[np.ndarray]:
    """Contiguous blocks of periods, or blocks of a seeded permutation"""
    order = np.arange(num_periods) if seed is None else make_rng(seed).permutation(num_periods)
    return [np.sort(block) for block in np.array_split(order, folds)]


def _score_fold(
    data: TransactionData, test: np.ndarray, d: int, theta: float, spec: Optional[UtilitySpec], k: int
) -> FoldScore:
    train = np.setdiff1d(np.arange(data.num_periods), test)
    train_data, test_data = data.subset(train.tolist()), data.subset(test.tolist())
    if any(not S for S in test_data.assortments) or train_data.total() == 0:
        raise DegenerateFold(f"Fold {k} has an empty choice set or no training transactions")

    structure = restrict_to_offered(build_candidate_hypergraph(train_data, d, theta), train_data)
    params, _ = fit_mle(train_data, structure, spec)

    model = LikelihoodModel(test_data, structure, spec)
    score = evaluate_shares(model, _theta_of(model, params))
    Log.event("cv_fold", {"fold": k, "d": d, "theta": theta, "chi2": score.chi2, "mse": score.mse})
    if score.skipped:
        Log.debug(f"Fold {k}: skipped {score.skipped} zero-share cells in chi2")
    return score


def _theta_of(model: LikelihoodModel, params: UtilityParams) -> np.ndarray:
    values = []
    for name in model.names:
        kind, _, rest = name.partition("_")
        if kind == "alpha":
            values.append(params.item.get(int(rest), 0.0))
        elif kind == "eta" and rest == "r":
            values.append(params.eta_r)
        elif kind == "eta":
            values.append(params.eta.get(int(rest), 0.0))
        else:
            a, b = rest.split("_")
            values.append(params.beta.get((int(a), int(b)), 0.0))
    return np.array(values)


def _improvement(base: float, value: float) -> float:
    return 0.0 if base == 0 else 100.0 * (base - value) / base


def cross_validate(
    data: TransactionData,
    candidates: Sequence[Tuple[int, float]],
    folds: int = 5,
    spec: Optional[UtilitySpec] = None,
    workers: Optional[int] = None,
    seed: Optional[int] = None,
) -> pd.DataFrame:
    """
    Out-of-sample chi^2 and MSE per (d, theta) candidate.

    Periods are split into folds in order, or after a seeded shuffle when
    seed is given. Both measures are summed over the held-out folds. The
    d = 1 baseline is added when missing and improvements are relative to it.

    Returns:
        Frame with columns d, theta, chi2, chi2_improve_pct, mse,
        mse_improve_pct, one row per candidate, baseline first

    Raises:
        DegenerateFold: If a fold has an empty choice set or no training data
    """
    if folds < 2:
        raise InvalidInput(f"folds must be >= 2, got {folds}")
    if data.num_periods < folds:
        raise InvalidInput(f"{data.num_periods} periods cannot fill {folds} folds")
    if data.total() == 0:
        raise NoTransactions("No transactions to cross-validate")

    grid = [(1, 1.0)] + [(int(d), float(t)) for d, t in candidates if int(d) != 1]
    splits = _fold_indices(data.num_periods, folds, seed)

    def run(candidate: Tuple[int, float]) -> Tuple[float, float]:
        d, theta = candidate
        jobs = [(data, test, d, theta, spec, k) for k, test in enumerate(splits)]
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                scores = list(pool.map(lambda job: _score_fold(*job), jobs))
        else:
            scores = [_score_fold(*job) for job in jobs]
        return sum(s.chi2 for s in scores), sum(s.mse for s in scores)

    results = [run(c) for c in grid]
    base_chi2, base_mse = results[0]
    return pd.DataFrame(
        {
            "d": [d for d, _ in grid],
            "theta": [t for _, t in grid],
            "chi2": [c for c, _ in results],
            "chi2_improve_pct": [_improvement(base_chi2, c) for c, _ in results],
            "mse": [m for _, m in results],
            "mse_improve_pct": [_improvement(base_mse, m) for _, m in results],
        }
    )
