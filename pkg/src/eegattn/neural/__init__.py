"""Dense numeric core: seeded parameters, LSTM/biLSTM with exact BPTT,
Adam, elementwise ops and a finite-difference gradient checker."""

from .adam import AdamState, adam_step
from .gradcheck import GradCheckReport, grad_check
from .lstm import (
    GATES,
    add_bilstm_params,
    add_lstm_params,
    bilstm_backward,
    bilstm_forward,
    lstm_backward,
    lstm_forward,
    lstm_param_names,
)
from .ops import bce, dropout, dropout_mask, mse, pad_batch, sigmoid, softmax
from .params import CHECKPOINT_SCHEMA, ModelParams
