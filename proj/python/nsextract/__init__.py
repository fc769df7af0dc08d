"""Normal-form rewriting and witness extraction for nonstandard proof scripts."""

from ._core import (
    NsxError,
    detect_normal_form,
    evaluate,
    print_parse_term,
    reverse_check,
    run_corpus,
    run_script,
    run_translation,
    term_type,
    translate,
    verify_cri,
)

__all__ = [
    "NsxError",
    "detect_normal_form",
    "evaluate",
    "print_parse_term",
    "reverse_check",
    "run_corpus",
    "run_script",
    "run_translation",
    "term_type",
    "translate",
    "verify_cri",
]
