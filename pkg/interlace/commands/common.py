from __future__ import annotations

import argparse
from fractions import Fraction
from typing import Any

import pandas as pd
from pydantic import BaseModel

from interlace.errors import DomainError
from interlace.models import FinSet, OrdinalCNF
from interlace.services.schreier_service import ordinal_parse


def finset_arg(text: str) -> FinSet:
    try:
        return FinSet.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(exc.detail) from exc


def rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def epsilon_arg(text: str) -> Fraction:
    value = rational_arg(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie strictly between 0 and 1, got {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def ordinal_arg(text: str) -> OrdinalCNF:
    try:
        return ordinal_parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(exc.detail) from exc


def int_list_arg(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc


def _frame(key: str, value: Any) -> pd.DataFrame:
    if value and isinstance(value[0], dict):
        return pd.DataFrame(value)
    return pd.DataFrame({key: value})


def render_table(payload: dict[str, Any]) -> str:
    """Scalar fields in one row, then one table per list or mapping field."""
    sections = []
    scalars = {key: value for key, value in payload.items() if not isinstance(value, (list, dict))}
    if scalars:
        sections.append(pd.DataFrame([scalars]).to_string(index=False))
    for key, value in payload.items():
        if isinstance(value, list) and value:
            sections.append(f"{key}:\n" + _frame(key, value).to_string(index=False))
        elif isinstance(value, dict) and value:
            if any(isinstance(inner, (list, dict)) for inner in value.values()):
                sections.append(f"{key}:\n" + render_table(value))
            else:
                frame = pd.DataFrame({"key": list(value), "value": list(value.values())})
                sections.append(f"{key}:\n" + frame.to_string(index=False))
    return "\n\n".join(sections)


def render(result: BaseModel, pretty: bool = False) -> str:
    if pretty:
        return render_table(result.model_dump(mode="json", exclude_none=True))
    return result.model_dump_json(exclude_none=True)


def exit_code_for(result: BaseModel) -> int:
    if getattr(result, "passed", True) is False:
        return 1
    report = getattr(result, "report", None)
    if report is not None and not report.passed:
        return 1
    return 0
