# Copyright 2026  EmoAug authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Speaking-style-transfer data augmentation for speech emotion recognition.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: mel features, k-means unit quantization, style transfer,
baseline augmenters, class-balancing arithmetic, and evaluation metrics.
"""

from emoaug._emoaug import (  # noqa: F401
    Codebook,
    ConfigError,
    ContractError,
    DataError,
    Model,
    ShapeError,
    balance_quotas,
    compute_metrics,
    copy_paste,
    deduplicate,
    default_config_json,
    emotions,
    fit_codebook,
    generate_toy_corpus,
    invert_mel,
    load_wav,
    make_folds,
    mel_spectrogram,
    pitch_shift,
    quantize,
    save_wav,
    speed_perturb,
    toy_config_json,
)

__all__ = [
    "Codebook",
    "ConfigError",
    "ContractError",
    "DataError",
    "Model",
    "ShapeError",
    "balance_quotas",
    "compute_metrics",
    "copy_paste",
    "deduplicate",
    "default_config_json",
    "emotions",
    "fit_codebook",
    "generate_toy_corpus",
    "invert_mel",
    "load_wav",
    "make_folds",
    "mel_spectrogram",
    "pitch_shift",
    "quantize",
    "save_wav",
    "speed_perturb",
    "toy_config_json",
]

__version__ = "0.1.0"
