"""
Reverse-mode differentiable tensors on top of numpy.

Operations executed while a Tape is active are recorded on it in execution order;
Tape.backward walks the records in exact reverse, so no recursion over the graph is
needed however long the unrolled computation gets. Outside a tape the same functions
evaluate plainly and record nothing.

Broadcasting is limited to leading dimensions: an operand may have a shape that is a
suffix of the other operand's shape (a bias against a batch, a scalar against anything).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from errors import ValidationError

BackwardFn = Callable[[np.ndarray], Sequence["np.ndarray | None"]]

_local = threading.local()


def _tape_stack() -> list["Tape"]:
    if not hasattr(_local, "stack"):
        _local.stack = []
    return _local.stack


def current_tape() -> "Tape | None":
    """The innermost active tape of this thread, if any."""
    stack = _tape_stack()
    return stack[-1] if stack else None


@dataclass
class _Record:
    output: "Tensor"
    inputs: tuple["Tensor", ...]
    backward: BackwardFn


class Tape:
    """
    Ordered record of differentiable operations.

    Usage:
        with Tape() as tape:
            loss = model(...)
        loss.backward()
    """

    def __init__(self):
        self._records: list[_Record] = []

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        _tape_stack().remove(self)

    def __len__(self) -> int:
        return len(self._records)

    def record(self, output: "Tensor", inputs: tuple["Tensor", ...], backward: BackwardFn) -> None:
        output._tape = self
        self._records.append(_Record(output, inputs, backward))

    def clear(self) -> None:
        self._records.clear()

    def backward(self, loss: "Tensor") -> None:
        """Accumulate d(loss)/d(leaf) into the .grad of every reachable leaf."""
        if loss.data.size != 1:
            raise ValidationError(f"backward needs a scalar loss, got shape {loss.shape}")

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        tensors: dict[int, Tensor] = {id(loss): loss}
        for record in reversed(self._records):
            upstream = grads.pop(id(record.output), None)
            if upstream is None:
                continue
            for tensor, grad in zip(record.inputs, record.backward(upstream)):
                if grad is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + grad
                else:
                    grads[key] = grad
                    tensors[key] = tensor

        for key, grad in grads.items():
            tensor = tensors[key]
            if tensor._tape is not None:
                continue  # produced on another tape; not a leaf here
            grad = np.reshape(grad, tensor.data.shape)
            tensor.grad = grad.copy() if tensor.grad is None else tensor.grad + grad


class Tensor:
    """A float64 array with an optional gradient buffer."""

    __array_priority__ = 100  # make ndarray <op> Tensor defer to Tensor

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.array(data, dtype=np.float64, order="C")
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self._tape: Tape | None = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self._tape is None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def backward(self) -> None:
        if self._tape is None:
            if self.data.size != 1:
                raise ValidationError(f"backward needs a scalar loss, got shape {self.shape}")
            if self.requires_grad:
                self.grad = np.ones_like(self.data) if self.grad is None else self.grad + 1.0
            return
        self._tape.backward(self)

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __getitem__(self, index):
        return slice_(self, index)

    def sum(self, axis: int | None = None) -> "Tensor":
        return sum_(self, axis)

    def mean(self, axis: int | None = None) -> "Tensor":
        return mean(self, axis)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def relu(self) -> "Tensor":
        return relu(self)

    def tanh(self) -> "Tensor":
        return tanh(self)

    def abs(self) -> "Tensor":
        return abs_(self)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _result(data: np.ndarray, inputs: tuple[Tensor, ...], backward: BackwardFn) -> Tensor:
    out = Tensor(data)
    tape = current_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.record(out, inputs, backward)
    return out


def _broadcast_shape(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if a == b:
        return a
    if len(a) <= len(b) and b[len(b) - len(a):] == a:
        return b
    if len(b) < len(a) and a[len(a) - len(b):] == b:
        return a
    raise ValidationError(f"incompatible shapes {a} and {b}: only leading dimensions broadcast")


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad


# ============================================
# Elementwise
# ============================================


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _result(a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def backward(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return _result(a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _result(a.data * b.data, (a, b), backward)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)

    def backward(g):
        return (g * c,)

    return _result(a.data * c, (a,), backward)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def backward(g):
        return (g * mask,)

    return _result(np.where(mask, a.data, 0.0), (a,), backward)


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)

    def backward(g):
        return (g * (1.0 - out * out),)

    return _result(out, (a,), backward)


def abs_(a: Tensor) -> Tensor:
    # subgradient convention: d|x|/dx = 0 at x = 0
    sign = np.sign(a.data)

    def backward(g):
        return (g * sign,)

    return _result(np.abs(a.data), (a,), backward)


# ============================================
# Contraction
# ============================================


def _parse_subscripts(spec: str, operands: Sequence[Tensor]) -> tuple[list[str], str]:
    if "->" not in spec:
        raise ValidationError(f"contraction '{spec}' must name its output explicitly with '->'")
    lhs, out = spec.replace(" ", "").split("->")
    inputs = lhs.split(",")
    if len(inputs) != len(operands):
        raise ValidationError(f"contraction '{spec}' names {len(inputs)} operands, got {len(operands)}")

    sizes: dict[str, int] = {}
    for sub, operand in zip(inputs, operands):
        if not sub.isalpha() and sub:
            raise ValidationError(f"contraction '{spec}': only letters may index operands")
        if len(set(sub)) != len(sub):
            raise ValidationError(f"contraction '{spec}': repeated index within '{sub}'")
        if len(sub) != operand.ndim:
            raise ValidationError(
                f"contraction '{spec}': '{sub}' indexes {len(sub)} axes, operand has shape {operand.shape}"
            )
        for letter, size in zip(sub, operand.shape):
            if sizes.setdefault(letter, size) != size:
                raise ValidationError(
                    f"contraction '{spec}': index '{letter}' has sizes {sizes[letter]} and {size}"
                )
    if len(set(out)) != len(out) or any(letter not in sizes for letter in out):
        raise ValidationError(f"contraction '{spec}': output indices must be unique and used by an input")
    for k, sub in enumerate(inputs):
        elsewhere = set(out).union(*(set(s) for j, s in enumerate(inputs) if j != k))
        missing = set(sub) - elsewhere
        if missing:
            raise ValidationError(
                f"contraction '{spec}': index {''.join(sorted(missing))} of operand {k + 1} "
                "is summed within that operand alone; use sum() for that"
            )
    return inputs, out


def contract(spec: str, *operands) -> Tensor:
    """
    Sum of products over repeated indices, einsum style.

    Example:
        contract("bkzh,bkh->bkz", G, dH)
    """
    operands = tuple(as_tensor(op) for op in operands)
    inputs, out = _parse_subscripts(spec, operands)
    data = np.einsum(spec, *(op.data for op in operands), optimize=True)

    def backward(g):
        grads = []
        for k, sub in enumerate(inputs):
            if not operands[k].requires_grad:
                grads.append(None)
                continue
            others = [op.data for j, op in enumerate(operands) if j != k]
            other_subs = [s for j, s in enumerate(inputs) if j != k]
            grads.append(np.einsum(",".join([out, *other_subs]) + "->" + sub, g, *others, optimize=True))
        return grads

    return _result(np.asarray(data, dtype=np.float64), operands, backward)


def transpose(a: Tensor, axes: Sequence[int]) -> Tensor:
    letters = "abcdefghijklmnopqrstuvwxyz"[: a.ndim]
    permuted = "".join(letters[i] for i in axes)
    return contract(f"{letters}->{permuted}", a)


# ============================================
# Reductions and shape
# ============================================


def _check_axis(a: Tensor, axis: int | None) -> int | None:
    if axis is None:
        return None
    if not -a.ndim <= axis < a.ndim:
        raise ValidationError(f"axis {axis} out of range for shape {a.shape}")
    return axis % a.ndim


def sum_(a: Tensor, axis: int | None = None) -> Tensor:
    axis = _check_axis(a, axis)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), a.shape).copy(),)

    return _result(np.asarray(a.data.sum(axis=axis)), (a,), backward)


def mean(a: Tensor, axis: int | None = None) -> Tensor:
    axis = _check_axis(a, axis)
    count = a.size if axis is None else a.shape[axis]
    return scale(sum_(a, axis), 1.0 / count)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        data = a.data.reshape(tuple(shape))
    except ValueError as e:
        raise ValidationError(f"cannot reshape {a.shape} into {tuple(shape)}") from e

    def backward(g):
        return (g.reshape(a.shape),)

    return _result(data, (a,), backward)


def slice_(a: Tensor, index) -> Tensor:
    """Basic indexing (ints, slices); fancy indexing is not supported."""
    items = index if isinstance(index, tuple) else (index,)
    if any(not isinstance(i, (int, slice, type(Ellipsis))) for i in items):
        raise ValidationError("only integer and slice indexing is differentiable")
    data = a.data[index]

    def backward(g):
        full = np.zeros_like(a.data)
        full[index] += g
        return (full,)

    return _result(np.array(data), (a,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = tuple(as_tensor(t) for t in tensors)
    if not tensors:
        raise ValidationError("concat needs at least one tensor")
    axis = _check_axis(tensors[0], axis)
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as e:
        raise ValidationError(f"cannot concatenate shapes {[t.shape for t in tensors]}") from e
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _result(data, tensors, backward)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    axis = _check_axis(a, axis)
    shifted = np.exp(a.data - a.data.max(axis=axis, keepdims=True))
    out = shifted / shifted.sum(axis=axis, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return _result(out, (a,), backward)


# ============================================
# Helpers over parameter collections
# ============================================


def zero_grad(params: Mapping[str, Tensor] | Iterable[Tensor]) -> None:
    for p in params.values() if isinstance(params, Mapping) else params:
        p.zero_grad()
