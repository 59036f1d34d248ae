from .checkpoint import assign_parameters, load_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .optim import Adam, OptimizerState, adam_step, clip_grad_norm
from .tensor import (
    Tape,
    Tensor,
    abs_,
    add,
    as_tensor,
    concat,
    contract,
    current_tape,
    mean,
    mul,
    relu,
    reshape,
    scale,
    slice_,
    softmax,
    sub,
    sum_,
    tanh,
    transpose,
    zero_grad,
)

__all__ = [
    "Adam",
    "OptimizerState",
    "Tape",
    "Tensor",
    "abs_",
    "adam_step",
    "add",
    "as_tensor",
    "assign_parameters",
    "clip_grad_norm",
    "concat",
    "contract",
    "current_tape",
    "grad_check",
    "load_checkpoint",
    "mean",
    "mul",
    "relu",
    "reshape",
    "save_checkpoint",
    "scale",
    "slice_",
    "softmax",
    "sub",
    "sum_",
    "tanh",
    "transpose",
    "zero_grad",
]
