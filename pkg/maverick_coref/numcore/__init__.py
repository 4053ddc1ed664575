# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from maverick_coref.numcore.encoder import EncoderOutput, encode, encoder_param_specs
from maverick_coref.numcore.gradcheck import GradCheckReport, backward, finite_diff_check
from maverick_coref.numcore.ops import ffn_project
from maverick_coref.numcore.params import ModelParams, ParamTape, bind, init_params
from maverick_coref.numcore.tensor import Tensor

__all__ = [
	"EncoderOutput",
	"GradCheckReport",
	"ModelParams",
	"ParamTape",
	"Tensor",
	"backward",
	"bind",
	"encode",
	"encoder_param_specs",
	"ffn_project",
	"finite_diff_check",
	"init_params",
]
