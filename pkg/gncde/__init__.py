from .config import (
    InnerMechanism,
    ModelConfig,
    OuterMechanism,
    vertex_mixing_matrix,
)
from .control import ControlPath, build_control_path
from .fields import (
    control_contraction,
    informed_contraction,
    vector_field_f,
    vector_field_g,
)
from .mechanisms import agc_adjacency, agc_layer, inner_mixer, outer_matrix
from .model import derivatives, forward, forward_batch, init_states, integrate, readout, solve
from .params import GNCDEParams, copy_params, count_params, init_params, parameter_shapes

__all__ = [
    "ControlPath",
    "GNCDEParams",
    "InnerMechanism",
    "ModelConfig",
    "OuterMechanism",
    "agc_adjacency",
    "agc_layer",
    "build_control_path",
    "control_contraction",
    "copy_params",
    "count_params",
    "derivatives",
    "forward",
    "forward_batch",
    "informed_contraction",
    "init_params",
    "init_states",
    "inner_mixer",
    "integrate",
    "outer_matrix",
    "parameter_shapes",
    "readout",
    "solve",
    "vector_field_f",
    "vector_field_g",
    "vertex_mixing_matrix",
]
