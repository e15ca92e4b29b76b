"""Desk-scale ASR+TTS voice conversion with prosody modeling.

Two conversion-time prosody strategies are provided: source prosody
transfer (SPT), which reuses the source utterance as the reference for a
global-style-token encoder, and target text prediction (TTP), which
predicts the style embedding from the recognized content alone.
"""

__version__ = "0.1.0"
