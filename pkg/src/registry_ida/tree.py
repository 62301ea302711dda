"""Variance-splitting regression trees over per-row missingness.

The target is the per-row fraction of a provider's columns that are
missing; the features are the provider's own columns.  Fitting is
greedy recursive partitioning: at each node the split maximizing the
reduction in sum of squares is chosen among all features and cutpoints.
Split goodness is evaluated on the rows where the candidate feature is
observed; rows where the chosen feature is missing are routed by
surrogate splits, and by the majority direction when no surrogate
applies.

Determinism contract: equal improvements are broken toward the lowest
feature index, then the smallest threshold (numeric) or the shortest
level prefix (categorical).  Categorical cutpoints scan prefixes of the
levels ordered by mean target (ties by level name), which reaches the
same optimum as full subset enumeration for a variance criterion.

Surrogate agreement is counted on the rows where the primary and the
candidate feature are both observed.  A surrogate is kept only when it
strictly beats the baseline of sending every such row to the primary
split's majority direction; its adjusted agreement is
(agreement - baseline) / (1 - baseline), a reimplementation choice.
Surrogates are ranked by agreement fraction, ties toward the lower
feature index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyCohort, EmptyProviderIndex, InvalidConfig, NoUsableFeatures
from .missingness import opm_vector
from .model import NUMERIC_KINDS, RegistryTable


@dataclass(frozen=True)
class TreeParams:
    """Fitting parameters; the defaults are the standard ones."""

    min_split: int = 20
    min_bucket: int = 7
    cp: float = 0.01
    max_surrogates: int = 5
    surrogate_fallback: bool = True
    cv_folds: int = 10
    max_depth: int = 30
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self) -> None:
        if self.min_bucket > self.min_split:
            raise InvalidConfig("min_bucket must not exceed min_split")
        if not 0 < self.cp < 1:
            raise InvalidConfig("cp must be in (0, 1)")
        if not 0 < self.train_fraction < 1:
            raise InvalidConfig("train_fraction must be in (0, 1)")
        if self.min_bucket < 1 or self.max_depth < 1 or self.cv_folds < 2:
            raise InvalidConfig("min_bucket, max_depth >= 1; cv_folds >= 2")


@dataclass
class Feature:
    """One predictor column in fit-ready encoding.

    Numeric features hold float values with NaN for missing (sentinel
    codes included).  Categorical features hold integer level codes
    with -1 for missing; `levels` maps code to level name.
    """

    name: str
    kind: str  # "numeric" | "categorical"
    values: np.ndarray
    levels: tuple[str, ...] = ()

    def observed(self) -> np.ndarray:
        if self.kind == "numeric":
            return ~np.isnan(self.values)
        return self.values >= 0


@dataclass
class TreeDataset:
    """Targets plus encoded features for one (table, provider) pair."""

    table: str
    provider: str
    features: list[Feature]
    y: np.ndarray
    row_ids: np.ndarray

    @property
    def n(self) -> int:
        return int(self.y.size)

    def subset(self, idx: np.ndarray) -> "TreeDataset":
        return TreeDataset(
            table=self.table,
            provider=self.provider,
            features=[
                Feature(f.name, f.kind, f.values[idx], f.levels)
                for f in self.features
            ],
            y=self.y[idx],
            row_ids=self.row_ids[idx],
        )


@dataclass
class SplitSpec:
    """A routing rule: numeric threshold or categorical level subset."""

    feature: int
    kind: str
    threshold: float = 0.0
    left_if_le: bool = True
    left_levels: frozenset = frozenset()
    improvement: float = 0.0
    agreement: float = 0.0
    adjusted_agreement: float = 0.0


@dataclass
class TreeNode:
    node_id: int
    depth: int
    n: int
    prediction: float
    split: SplitSpec | None = None
    surrogates: tuple[SplitSpec, ...] = ()
    majority_left: bool = True
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None


@dataclass
class RegressionTree:
    table: str
    provider: str
    feature_names: tuple[str, ...]
    feature_kinds: tuple[str, ...]
    feature_levels: tuple[tuple[str, ...], ...]
    params: TreeParams
    root: TreeNode
    ss_root: float

    def nodes(self) -> list[TreeNode]:
        out: list[TreeNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)
        out.sort(key=lambda n: n.node_id)
        return out

    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes() if n.is_leaf)

    def depth(self) -> int:
        return max(n.depth for n in self.nodes())


@dataclass(frozen=True)
class ImportanceRow:
    feature: str
    raw: float
    adjusted: float
    important: bool


def prepare_tree_dataset(table: RegistryTable, provider: str) -> TreeDataset:
    """Target and feature encoding over the provider's rows.

    A column becomes a feature when it has at least two distinct
    observed values, and, for non-numeric columns, at most 250 distinct
    observed values.  For numeric columns the distinct count is over
    parseable numbers: sentinel codes route to NaN like missing cells.
    """
    rows = table.provider_rows(provider)
    if not rows.any():
        raise EmptyProviderIndex(
            f"table {table.name!r}: provider {provider!r} observes no rows"
        )
    y = opm_vector(table, provider)
    row_ids = np.flatnonzero(rows)
    features: list[Feature] = []
    for j in table.provider_columns(provider):
        meta = table.columns[j]
        if meta.kind in NUMERIC_KINDS:
            vals = table.numeric_array(meta.name)[rows]
            observed = vals[~np.isnan(vals)]
            if np.unique(observed).size < 2:
                continue
            features.append(Feature(meta.name, "numeric", vals))
        else:
            labels = table.string_array(meta.name)
            present = sorted(
                {labels[i] for i in row_ids if labels[i] is not None}
            )
            if not 2 <= len(present) <= 250:
                continue
            code_of = {level: c for c, level in enumerate(present)}
            codes = np.array(
                [
                    code_of[labels[i]] if labels[i] is not None else -1
                    for i in row_ids
                ],
                dtype=np.int64,
            )
            features.append(
                Feature(meta.name, "categorical", codes, tuple(present))
            )
    if not features:
        raise NoUsableFeatures(
            f"table {table.name!r}, provider {provider!r}: no column passes "
            "the feature filter"
        )
    return TreeDataset(
        table=table.name,
        provider=provider,
        features=features,
        y=y,
        row_ids=row_ids,
    )


def split_train_test(
    dataset: TreeDataset, params: TreeParams
) -> tuple[TreeDataset, TreeDataset]:
    """Seeded random split preserving row order within each part."""
    n = dataset.n
    if n < 2:
        raise EmptyCohort("need at least two rows to split")
    rng = np.random.default_rng(params.seed)
    perm = rng.permutation(n)
    n_train = int(round(params.train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return dataset.subset(train_idx), dataset.subset(test_idx)


def _ss(y: np.ndarray) -> float:
    if y.size == 0:
        return 0.0
    centered = y - y.mean()
    return float((centered * centered).sum())


def _best_numeric_split(
    vals: np.ndarray, y: np.ndarray, min_bucket: int
) -> tuple[float, float] | None:
    """Best (improvement, threshold) on observed rows, or None."""
    obs = ~np.isnan(vals)
    vo = vals[obs]
    yo = y[obs]
    n_obs = vo.size
    if n_obs < 2 * min_bucket:
        return None
    order = np.argsort(vo, kind="stable")
    vs = vo[order]
    ys = yo[order]
    cy = np.cumsum(ys)
    cy2 = np.cumsum(ys * ys)
    tot_y = cy[-1]
    tot_y2 = cy2[-1]
    ss_obs = tot_y2 - tot_y * tot_y / n_obs
    t = np.arange(1, n_obs)
    valid = (vs[1:] > vs[:-1]) & (t >= min_bucket) & (n_obs - t >= min_bucket)
    if not valid.any():
        return None
    ssl = cy2[:-1] - cy[:-1] * cy[:-1] / t
    ssr = (tot_y2 - cy2[:-1]) - (tot_y - cy[:-1]) ** 2 / (n_obs - t)
    impr = np.where(valid, ss_obs - ssl - ssr, -np.inf)
    best = int(np.argmax(impr))  # first max: smallest threshold
    if not np.isfinite(impr[best]):
        return None
    threshold = (vs[best] + vs[best + 1]) / 2
    return float(impr[best]), float(threshold)


def _best_categorical_split(
    codes: np.ndarray, y: np.ndarray, min_bucket: int, levels: tuple[str, ...]
) -> tuple[float, frozenset] | None:
    """Best (improvement, left level codes) on observed rows, or None."""
    obs = codes >= 0
    co = codes[obs]
    yo = y[obs]
    n_obs = co.size
    if n_obs < 2 * min_bucket:
        return None
    width = int(co.max()) + 1
    counts_all = np.bincount(co, minlength=width)
    sums_all = np.bincount(co, weights=yo, minlength=width)
    sums2_all = np.bincount(co, weights=yo * yo, minlength=width)
    present = np.flatnonzero(counts_all)
    if present.size < 2:
        return None
    counts = counts_all[present].astype(float)
    sums = sums_all[present]
    sums2 = sums2_all[present]
    means = sums / counts
    order = sorted(
        range(present.size), key=lambda i: (means[i], levels[present[i]])
    )
    counts = counts[order]
    sums = sums[order]
    sums2 = sums2[order]
    cc = np.cumsum(counts)
    cy = np.cumsum(sums)
    cy2 = np.cumsum(sums2)
    tot_n = cc[-1]
    tot_y = cy[-1]
    tot_y2 = cy2[-1]
    ss_obs = tot_y2 - tot_y * tot_y / tot_n
    t = cc[:-1]
    valid = (t >= min_bucket) & (tot_n - t >= min_bucket)
    if not valid.any():
        return None
    ssl = cy2[:-1] - cy[:-1] * cy[:-1] / t
    ssr = (tot_y2 - cy2[:-1]) - (tot_y - cy[:-1]) ** 2 / (tot_n - t)
    impr = np.where(valid, ss_obs - ssl - ssr, -np.inf)
    best = int(np.argmax(impr))  # first max: shortest prefix
    if not np.isfinite(impr[best]):
        return None
    left = frozenset(int(present[order[i]]) for i in range(best + 1))
    return float(impr[best]), left


def _best_split(
    dataset: TreeDataset, idx: np.ndarray, params: TreeParams
) -> SplitSpec | None:
    y_node = dataset.y[idx]
    best: SplitSpec | None = None
    for f_idx, feat in enumerate(dataset.features):
        vals = feat.values[idx]
        if feat.kind == "numeric":
            found = _best_numeric_split(vals, y_node, params.min_bucket)
            if found is None:
                continue
            impr, threshold = found
            if best is None or impr > best.improvement:
                best = SplitSpec(
                    feature=f_idx,
                    kind="numeric",
                    threshold=threshold,
                    improvement=impr,
                )
        else:
            found = _best_categorical_split(
                vals, y_node, params.min_bucket, feat.levels
            )
            if found is None:
                continue
            impr, left = found
            if best is None or impr > best.improvement:
                best = SplitSpec(
                    feature=f_idx,
                    kind="categorical",
                    left_levels=left,
                    improvement=impr,
                )
    return best


def _route_array(spec: SplitSpec, values: np.ndarray) -> np.ndarray:
    """Directions as floats: 1 left, 0 right, NaN unroutable."""
    if spec.kind == "numeric":
        out = np.full(values.shape, np.nan)
        obs = ~np.isnan(values)
        le = values[obs] <= spec.threshold
        out[obs] = np.where(le == spec.left_if_le, 1.0, 0.0)
        return out
    out = np.full(values.shape, np.nan)
    obs = values >= 0
    left_list = np.array(sorted(spec.left_levels), dtype=np.int64)
    out[obs] = np.isin(values[obs], left_list).astype(float)
    return out


def _best_numeric_surrogate(
    v: np.ndarray, d: np.ndarray
) -> tuple[int, float, bool] | None:
    """Max-agreement (count, threshold, left_if_le) mimicking d, or None."""
    n = v.size
    if n < 2:
        return None
    order = np.argsort(v, kind="stable")
    vs = v[order]
    ds = d[order].astype(np.int64)
    cum_left = np.cumsum(ds)
    total_left = int(cum_left[-1])
    t = np.arange(1, n)
    boundary = vs[1:] > vs[:-1]
    if not boundary.any():
        return None
    agree_le_left = cum_left[:-1] + (n - t) - (total_left - cum_left[:-1])
    best_count = -1
    best_threshold = 0.0
    best_le_left = True
    for orientation in (True, False):
        scores = agree_le_left if orientation else n - agree_le_left
        scores = np.where(boundary, scores, -1)
        pos = int(np.argmax(scores))  # first max: smallest threshold
        count = int(scores[pos])
        if count > best_count:
            best_count = count
            best_threshold = float((vs[pos] + vs[pos + 1]) / 2)
            best_le_left = orientation
    return best_count, best_threshold, best_le_left


def _best_categorical_surrogate(
    codes: np.ndarray, d: np.ndarray
) -> tuple[int, frozenset] | None:
    """Per-level majority assignment (count, left codes), or None."""
    if codes.size == 0:
        return None
    width = int(codes.max()) + 1
    left_cnt = np.bincount(codes[d], minlength=width)
    right_cnt = np.bincount(codes[~d], minlength=width)
    agree = int(np.maximum(left_cnt, right_cnt)[left_cnt + right_cnt > 0].sum())
    left = frozenset(
        int(c)
        for c in np.flatnonzero((left_cnt >= right_cnt) & (left_cnt + right_cnt > 0))
    )
    return agree, left


def _find_surrogates(
    dataset: TreeDataset,
    idx: np.ndarray,
    primary: SplitSpec,
    params: TreeParams,
) -> tuple[tuple[SplitSpec, ...], bool]:
    prim_dir = _route_array(
        primary, dataset.features[primary.feature].values[idx]
    )
    prim_obs = ~np.isnan(prim_dir)
    n_left = int(prim_dir[prim_obs].sum())
    n_right = int(prim_obs.sum()) - n_left
    majority_left = n_left >= n_right
    found: list[tuple[float, int, SplitSpec]] = []
    for g_idx, feat in enumerate(dataset.features):
        if g_idx == primary.feature:
            continue
        g_vals = feat.values[idx]
        g_obs = ~np.isnan(g_vals) if feat.kind == "numeric" else g_vals >= 0
        both = prim_obs & g_obs
        n_both = int(both.sum())
        if n_both == 0:
            continue
        d = prim_dir[both] == 1.0
        ma = int(d.sum()) if majority_left else n_both - int(d.sum())
        if feat.kind == "numeric":
            res = _best_numeric_surrogate(g_vals[both], d)
            if res is None:
                continue
            count, threshold, le_left = res
            spec = SplitSpec(
                feature=g_idx,
                kind="numeric",
                threshold=threshold,
                left_if_le=le_left,
            )
        else:
            res = _best_categorical_surrogate(
                g_vals[both].astype(np.int64), d
            )
            if res is None:
                continue
            count, left = res
            spec = SplitSpec(feature=g_idx, kind="categorical", left_levels=left)
        if count <= ma:
            continue
        spec.agreement = count / n_both
        spec.adjusted_agreement = (count - ma) / (n_both - ma)
        found.append((spec.agreement, g_idx, spec))
    found.sort(key=lambda item: (-item[0], item[1]))
    return tuple(spec for _, _, spec in found[: params.max_surrogates]), majority_left


def _route_rows(
    dataset: TreeDataset,
    idx: np.ndarray,
    node: TreeNode,
    fallback: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split idx into (left, right, stopped) row index arrays."""
    assert node.split is not None
    direction = _route_array(
        node.split, dataset.features[node.split.feature].values[idx]
    )
    undecided = np.isnan(direction)
    for surrogate in node.surrogates:
        if not undecided.any():
            break
        sdir = _route_array(
            surrogate, dataset.features[surrogate.feature].values[idx]
        )
        fill = undecided & ~np.isnan(sdir)
        direction[fill] = sdir[fill]
        undecided &= ~fill
    if fallback:
        direction[undecided] = 1.0 if node.majority_left else 0.0
        undecided[:] = False
    return (
        idx[direction == 1.0],
        idx[direction == 0.0],
        idx[undecided],
    )


def fit_tree(train: TreeDataset, params: TreeParams) -> RegressionTree:
    """Greedy recursive partitioning with surrogate splits."""
    if train.n == 0:
        raise EmptyCohort("cannot fit a tree on zero rows")
    y = train.y
    ss_root = _ss(y)
    counter = {"next": 1}

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        y_node = y[idx]
        constant = bool(np.all(y_node == y_node[0]))
        node = TreeNode(
            node_id=counter["next"],
            depth=depth,
            n=int(idx.size),
            # the mean of identical values is that value; bypassing the
            # summation keeps constant leaves bit-exact
            prediction=float(y_node[0]) if constant else float(y_node.mean()),
        )
        counter["next"] += 1
        if node.n < params.min_split or depth >= params.max_depth or constant:
            return node
        split = _best_split(train, idx, params)
        if (
            split is None
            or split.improvement <= 0
            or split.improvement < params.cp * ss_root
        ):
            return node
        node.split = split
        node.surrogates, node.majority_left = _find_surrogates(
            train, idx, split, params
        )
        left_idx, right_idx, _ = _route_rows(
            train, idx, node, params.surrogate_fallback
        )
        node.left = build(left_idx, depth + 1)
        node.right = build(right_idx, depth + 1)
        return node

    root = build(np.arange(train.n), 0)
    return RegressionTree(
        table=train.table,
        provider=train.provider,
        feature_names=tuple(f.name for f in train.features),
        feature_kinds=tuple(f.kind for f in train.features),
        feature_levels=tuple(f.levels for f in train.features),
        params=params,
        root=root,
        ss_root=ss_root,
    )


def predict(tree: RegressionTree, dataset: TreeDataset) -> np.ndarray:
    """Leaf predictions for every dataset row.

    Routing per node: primary split when its feature is observed, else
    surrogates in rank order, else the majority direction; with the
    majority fallback disabled, unroutable rows stop at the node and
    take its prediction.
    """
    out = np.empty(dataset.n)

    def walk(node: TreeNode, idx: np.ndarray) -> None:
        if idx.size == 0:
            return
        if node.is_leaf:
            out[idx] = node.prediction
            return
        left_idx, right_idx, stopped = _route_rows(
            dataset, idx, node, tree.params.surrogate_fallback
        )
        out[stopped] = node.prediction
        walk(node.left, left_idx)
        walk(node.right, right_idx)

    walk(tree.root, np.arange(dataset.n))
    return out


def evaluate_rmse(tree: RegressionTree, dataset: TreeDataset) -> float:
    """Root mean squared prediction error over the dataset."""
    if dataset.n == 0:
        raise EmptyCohort("cannot evaluate on zero rows")
    err = predict(tree, dataset) - dataset.y
    return float(np.sqrt((err * err).mean()))


def importance(tree: RegressionTree) -> list[ImportanceRow]:
    """Importance per feature: primary credit plus surrogate credit.

    A feature earns the full improvement at nodes where it is the
    primary splitter, and improvement times adjusted agreement where it
    serves as a surrogate.  Adjusted values rescale the maximum to 100;
    a feature is flagged important above 50.  Empty when the tree has
    no splits.
    """
    raw: dict[str, float] = {}
    for node in tree.nodes():
        if node.split is None:
            continue
        name = tree.feature_names[node.split.feature]
        raw[name] = raw.get(name, 0.0) + node.split.improvement
        for surrogate in node.surrogates:
            s_name = tree.feature_names[surrogate.feature]
            raw[s_name] = (
                raw.get(s_name, 0.0)
                + node.split.improvement * surrogate.adjusted_agreement
            )
    if not raw:
        return []
    top = max(raw.values())
    rows = [
        ImportanceRow(
            feature=name,
            raw=value,
            adjusted=100.0 * value / top,
            important=100.0 * value / top > 50.0,
        )
        for name, value in raw.items()
    ]
    rows.sort(key=lambda r: (-r.raw, r.feature))
    return rows


def cv_table(
    dataset: TreeDataset, params: TreeParams
) -> list[tuple[int, int, int, float]]:
    """Per-fold (fold, n_train, n_test, rmse) under seeded k-fold CV.

    Informational output: no pruning is derived from it.
    """
    n = dataset.n
    folds = min(params.cv_folds, n)
    if folds < 2:
        raise EmptyCohort("cross-validation needs at least two rows")
    rng = np.random.default_rng(params.seed)
    perm = rng.permutation(n)
    assignments = np.array_split(perm, folds)
    out = []
    for fold, test_idx in enumerate(assignments, start=1):
        test_idx = np.sort(test_idx)
        train_mask = np.ones(n, dtype=bool)
        train_mask[test_idx] = False
        train_idx = np.flatnonzero(train_mask)
        fitted = fit_tree(dataset.subset(train_idx), params)
        rmse = evaluate_rmse(fitted, dataset.subset(test_idx))
        out.append((fold, int(train_idx.size), int(test_idx.size), rmse))
    return out


def _fmt(value: float) -> str:
    return "%.6g" % value


def format_tree(tree: RegressionTree) -> str:
    """Self-describing nested text rendering of the fitted tree."""
    lines = [
        f"tree table={tree.table} provider={tree.provider} "
        f"n={tree.root.n} ss_root={_fmt(tree.ss_root)}"
    ]

    def describe(spec: SplitSpec) -> str:
        name = tree.feature_names[spec.feature]
        if spec.kind == "numeric":
            side = "left" if spec.left_if_le else "right"
            return (
                f"feature={name} kind=numeric "
                f"rule=(value<={_fmt(spec.threshold)} -> {side})"
            )
        levels = tree.feature_levels[spec.feature]
        names = sorted(levels[c] for c in spec.left_levels)
        return (
            f"feature={name} kind=categorical "
            f"rule=(value in [{'|'.join(names)}] -> left)"
        )

    def walk(node: TreeNode, indent: int) -> None:
        pad = "  " * indent
        tag = " leaf" if node.is_leaf else ""
        lines.append(
            f"{pad}node id={node.node_id} depth={node.depth} n={node.n} "
            f"prediction={_fmt(node.prediction)}{tag}"
        )
        if node.split is not None:
            lines.append(
                f"{pad}  split {describe(node.split)} "
                f"improvement={_fmt(node.split.improvement)}"
            )
            for rank, surrogate in enumerate(node.surrogates, start=1):
                lines.append(
                    f"{pad}  surrogate rank={rank} {describe(surrogate)} "
                    f"agreement={_fmt(surrogate.agreement)} "
                    f"adjusted={_fmt(surrogate.adjusted_agreement)}"
                )
            lines.append(
                f"{pad}  majority="
                f"{'left' if node.majority_left else 'right'}"
            )
            walk(node.left, indent + 1)
            walk(node.right, indent + 1)

    walk(tree.root, 0)
    return "\n".join(lines) + "\n"
