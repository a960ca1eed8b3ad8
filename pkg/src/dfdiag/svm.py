"""Multi-class support vector machine trained by sequential minimal optimization.

One binary machine per class (one-vs-rest), each solved in the dual by
pairwise coordinate ascent: repeatedly pick a multiplier violating the
optimality conditions, pair it with a second one, and solve the two-variable
subproblem analytically.  A full pass with no violating pair means every
training point satisfies the optimality conditions within tolerance.

Features are standardized with training-set statistics before the kernel
sees them.  Class probabilities come from a softmax over the per-class
decision values, which is what downstream probability fusion averages.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateLabels, FormatError, MissingData, NonFinite, ShapeError

KERNELS = ("rbf", "linear")
_MAGIC = b"DFDS"


@dataclass(frozen=True)
class SvmHyperParams:
    kernel: str = "rbf"
    gamma: float | None = None  # None: 1 / (width * mean feature variance)
    c_reg: float = 1.0
    tol: float = 1e-3
    max_passes: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ShapeError(f"unknown kernel {self.kernel!r}")
        if self.gamma is not None and self.gamma <= 0:
            raise ShapeError("gamma must be positive")
        if self.c_reg <= 0 or self.tol <= 0 or self.max_passes < 1:
            raise ShapeError("c_reg, tol and max_passes must be positive")


def _kernel_matrix(kind: str, gamma: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return a @ b.T
    sq = (a**2).sum(axis=1)[:, None] + (b**2).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def smo_solve(
    kernel: np.ndarray,
    y: np.ndarray,
    c_reg: float,
    tol: float,
    max_passes: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Dual solve for one binary machine.

    kernel: precomputed Gram matrix; y: labels in {-1, +1}.  Returns the full
    multiplier vector and the bias.  Stops when a complete sweep finds no
    violating pair (optimality within tol) or after max_passes sweeps.  An
    error cache is updated incrementally and refreshed once per sweep.
    """
    n = y.size
    alpha = np.zeros(n)
    b = 0.0
    for _ in range(max_passes):
        changed = 0
        errors = (alpha * y) @ kernel + b - y
        for i in range(n):
            e_i = errors[i]
            r_i = e_i * y[i]
            if not ((r_i < -tol and alpha[i] < c_reg) or (r_i > tol and alpha[i] > 0)):
                continue
            # second choice: largest |E_i - E_j| first, then a seeded shuffle
            first = int(np.argmax(np.abs(errors - e_i)))
            for j in [first, *rng.permutation(n)]:
                j = int(j)
                if j == i:
                    continue
                b_new = _pair_step(kernel, y, alpha, b, errors, i, j, c_reg)
                if b_new is None:
                    continue
                b = b_new
                changed += 1
                break
        if changed == 0:
            break
    return alpha, b


def _pair_step(kernel, y, alpha, b, errors, i, j, c_reg):
    """Analytic two-variable update; mutates alpha and the error cache.

    Returns the new bias, or None when the pair allows no progress.
    """
    e_i, e_j = errors[i], errors[j]
    a_i_old, a_j_old = alpha[i], alpha[j]
    if y[i] != y[j]:
        low = max(0.0, a_j_old - a_i_old)
        high = min(c_reg, c_reg + a_j_old - a_i_old)
    else:
        low = max(0.0, a_i_old + a_j_old - c_reg)
        high = min(c_reg, a_i_old + a_j_old)
    if high - low < 1e-12:
        return None
    eta = kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j]
    if eta <= 1e-12:
        return None
    a_j = a_j_old + y[j] * (e_i - e_j) / eta
    a_j = min(max(a_j, low), high)
    if abs(a_j - a_j_old) < 1e-7:
        return None
    a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
    alpha[i], alpha[j] = a_i, a_j

    d_i = y[i] * (a_i - a_i_old)
    d_j = y[j] * (a_j - a_j_old)
    b_i = b - e_i - d_i * kernel[i, i] - d_j * kernel[i, j]
    b_j = b - e_j - d_i * kernel[i, j] - d_j * kernel[j, j]
    if 0 < a_i < c_reg:
        b_new = b_i
    elif 0 < a_j < c_reg:
        b_new = b_j
    else:
        b_new = (b_i + b_j) / 2.0
    errors += d_i * kernel[:, i] + d_j * kernel[:, j] + (b_new - b)
    return float(b_new)


@dataclass(frozen=True)
class BinaryMachine:
    """One-vs-rest machine in compact support-vector form."""

    support: np.ndarray  # (n_sv, width) standardized support vectors
    coef: np.ndarray  # (n_sv,) alpha_i * y_i
    bias: float

    def decision(self, x_std: np.ndarray, kind: str, gamma: float) -> np.ndarray:
        if self.support.size == 0:
            return np.full(x_std.shape[0], self.bias)
        k = _kernel_matrix(kind, gamma, x_std, self.support)
        return k @ self.coef + self.bias


@dataclass(frozen=True)
class SvmModel:
    hp: SvmHyperParams
    gamma: float
    feature_ids: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    machines: tuple[BinaryMachine, ...]
    n_classes: int
    train_accuracy: float

    @property
    def width(self) -> int:
        return self.mean.size

    def decision_values(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.width:
            raise ShapeError(f"expected width {self.width}, got {x.shape[1]}")
        x_std = (x - self.mean) / self.std
        return np.stack(
            [m.decision(x_std, self.hp.kernel, self.gamma) for m in self.machines],
            axis=1,
        )

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Softmax over per-class decision values; rows sum to 1."""
        d = self.decision_values(x)
        d = d - d.max(axis=1, keepdims=True)
        e = np.exp(d)
        probs = e / e.sum(axis=1, keepdims=True)
        return probs if np.asarray(x).ndim > 1 else probs[0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        d = self.decision_values(x)
        return np.argmax(d, axis=1)


def train_svm(
    x: np.ndarray,
    y: np.ndarray,
    hp: SvmHyperParams,
    feature_ids: tuple[str, ...] = (),
) -> SvmModel:
    """Fit one-vs-rest machines on (samples, width) features with labels y."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ShapeError(f"features {x.shape} vs labels {y.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("features contain non-finite values")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabels("training data holds fewer than 2 classes")
    n_classes = int(classes.max()) + 1

    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    x_std = (x - mean) / std

    if hp.gamma is not None:
        gamma = hp.gamma
    else:
        mean_var = float(np.mean(np.var(x_std, axis=0)))
        gamma = 1.0 / (x.shape[1] * mean_var) if mean_var > 0 else 1.0 / x.shape[1]

    kernel = _kernel_matrix(hp.kernel, gamma, x_std, x_std)
    machines = []
    for c in range(n_classes):
        y_bin = np.where(y == c, 1.0, -1.0)
        rng = np.random.default_rng(np.random.SeedSequence([hp.seed, 11, c]))
        alpha, bias = smo_solve(kernel, y_bin, hp.c_reg, hp.tol, hp.max_passes, rng)
        sv = alpha > 0
        machines.append(
            BinaryMachine(
                support=x_std[sv].copy(),
                coef=(alpha * y_bin)[sv].copy(),
                bias=bias,
            )
        )
    model = SvmModel(
        hp=hp,
        gamma=gamma,
        feature_ids=tuple(feature_ids),
        mean=mean,
        std=std,
        machines=tuple(machines),
        n_classes=n_classes,
        train_accuracy=0.0,
    )
    from .metrics import accuracy

    train_acc = accuracy(model.predict(x), y)
    return replace(model, train_accuracy=train_acc)


def save_model(model: SvmModel, path) -> None:
    """Versioned binary container; arrays are raw little-endian float64."""

    def arr_bytes(a: np.ndarray) -> bytes:
        a = np.ascontiguousarray(a, dtype="<f8")
        return struct.pack("<I", a.ndim) + struct.pack(f"<{a.ndim}I", *a.shape) + a.tobytes()

    feats = ",".join(model.feature_ids).encode()
    kern = model.hp.kernel.encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<I", 1))
        fh.write(struct.pack("<I", len(kern)) + kern)
        fh.write(
            struct.pack(
                "<ddIIq",
                model.hp.c_reg,
                model.hp.tol,
                model.hp.max_passes,
                model.n_classes,
                model.hp.seed,
            )
        )
        fh.write(struct.pack("<dd", model.gamma, model.train_accuracy))
        fh.write(struct.pack("<I", len(feats)) + feats)
        fh.write(arr_bytes(model.mean))
        fh.write(arr_bytes(model.std))
        for m in model.machines:
            fh.write(arr_bytes(m.support))
            fh.write(arr_bytes(m.coef))
            fh.write(struct.pack("<d", m.bias))


def load_model(path) -> SvmModel:
    try:
        blob = open(path, "rb").read()
    except FileNotFoundError as exc:
        raise MissingData(f"{path}: model file missing") from exc
    off = 0

    def take(n: int) -> bytes:
        nonlocal off
        if off + n > len(blob):
            raise MissingData(f"{path}: truncated model file")
        out = blob[off : off + n]
        off += n
        return out

    def take_arr() -> np.ndarray:
        ndim = struct.unpack("<I", take(4))[0]
        shape = struct.unpack(f"<{ndim}I", take(4 * ndim))
        count = int(np.prod(shape)) if ndim else 1
        return np.frombuffer(take(8 * count), dtype="<f8").reshape(shape).copy()

    if take(4) != _MAGIC:
        raise FormatError(f"{path}: bad magic")
    version = struct.unpack("<I", take(4))[0]
    if version != 1:
        raise FormatError(f"{path}: expected version 1, got {version}")
    kern = take(struct.unpack("<I", take(4))[0]).decode()
    c_reg, tol, max_passes, n_classes, seed = struct.unpack("<ddIIq", take(28))
    gamma, train_acc = struct.unpack("<dd", take(16))
    feats_raw = take(struct.unpack("<I", take(4))[0]).decode()
    feature_ids = tuple(feats_raw.split(",")) if feats_raw else ()
    mean = take_arr()
    std = take_arr()
    machines = []
    for _ in range(n_classes):
        support = take_arr()
        coef = take_arr()
        bias = struct.unpack("<d", take(8))[0]
        machines.append(BinaryMachine(support=support, coef=coef, bias=bias))
    hp = SvmHyperParams(
        kernel=kern, gamma=gamma, c_reg=c_reg, tol=tol, max_passes=max_passes, seed=seed
    )
    return SvmModel(
        hp=hp,
        gamma=gamma,
        feature_ids=feature_ids,
        mean=mean,
        std=std,
        machines=tuple(machines),
        n_classes=n_classes,
        train_accuracy=train_acc,
    )
