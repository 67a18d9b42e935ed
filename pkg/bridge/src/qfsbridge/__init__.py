"""qfs-bridge: seq2seq fine-tuning and batch inference over the qfs-forge
JSONL file contracts. File-coupled only; no RPC."""

from .spec import BridgeError, BridgeJobSpec, default_hyperparams
from .train import run_finetune
from .infer import run_infer

__version__ = "0.1.0"
