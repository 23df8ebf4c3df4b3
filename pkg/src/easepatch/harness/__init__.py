"""LLM-facing pieces: clients, prompts, edit generation, judging, few-shot
selection and synthetic dataset generation."""
from .clients import (
    CallableClient,
    Completion,
    GenerationParams,
    HttpClient,
    LlmClient,
    RecordingClient,
    ReplayClient,
    ReplayMiss,
    TransportError,
    Usage,
    make_client,
    request_hash,
)
from .edit import (
    EditResult,
    OutputParseError,
    UnparseableVerdict,
    Verdict,
    generate_edit,
    generate_many,
    judge_pair,
    parse_model_output,
    parse_verdict,
)
from .prompts import EditRequest, FewShot, build_judge_prompt, build_prompt, load_template
from .shots import PoolTooSmall, select_examples, select_few_shots, shot_for
from .synth import SchemaViolation, SynthesisResult, synthesize_dataset
