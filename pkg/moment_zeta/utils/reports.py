"""
Report Writers

This module provides the JSON and CSV writers for command results, the
provenance block embedded in every report, and the bundle manifest.

Every integer of magnitude 2^53 or more and every rational is written as a
decimal string; polynomials and series are coefficient arrays.
"""

import os
import csv
import json
import hashlib
import logging
import datetime
import platform
from dataclasses import fields, is_dataclass
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np

from arithmetic_core.exactalg import Poly, RationalFunctionRF, ZetaSeries
from arithmetic_core.ffield import FieldCtx, FFElem
from moment_zeta.formulas import TrivialFactorSpec

logger = logging.getLogger(__name__)

SAFE_INT = 2 ** 53
REPORT_VERSION = 1


def to_jsonable(obj):
    """
    Convert results to plain JSON values.

    Args:
        obj: Report value (dataclass, Fraction, Poly, series, numpy scalar, ...)

    Returns:
        JSON-serializable value
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, int):
        return obj if abs(obj) < SAFE_INT else str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return to_jsonable(obj.numerator)
        return str(obj)
    if isinstance(obj, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(obj, 30)
    if isinstance(obj, Poly):
        return [to_jsonable(c) for c in obj.coeffs]
    if isinstance(obj, ZetaSeries):
        return [to_jsonable(c) for c in obj.coeffs]
    if isinstance(obj, RationalFunctionRF):
        return {
            "num": to_jsonable(obj.num),
            "den": to_jsonable(obj.den),
            "total_degree": obj.total_degree,
            "verified_to": obj.verified_to,
        }
    if isinstance(obj, TrivialFactorSpec):
        return {str(power): exp for power, exp in obj.factors}
    if isinstance(obj, FieldCtx):
        return obj.identity()
    if isinstance(obj, FFElem):
        return list(obj.coeffs)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    return str(obj)


def versions():
    """Interpreter and library versions recorded in every report."""
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "mpmath": mpmath.__version__,
        "networkx": nx.__version__,
    }


def provenance(method, oracle_checked, config=None, field=None):
    """
    Provenance block: how a number was computed and whether an oracle confirmed it.

    Args:
        method (str): Counting or reconstruction method
        oracle_checked (bool): An independent computation agreed
        config (RunConfig, optional): Run configuration
        field (FieldCtx, optional): Field whose modulus and generator were used

    Returns:
        dict: Provenance
    """
    block = {"method": method, "oracle_checked": bool(oracle_checked), "versions": versions()}
    if config is not None:
        block.update(config.provenance())
    if field is not None:
        block["field"] = field.identity()
    return block


def build_report(kind, result, method, oracle_checked, config=None, field=None, **extra):
    """Wrap a result with its provenance."""
    data = {
        "kind": kind,
        "result": to_jsonable(result),
        "provenance": provenance(method, oracle_checked, config, field),
    }
    data.update({k: to_jsonable(v) for k, v in extra.items()})
    return data


def dumps_report(data):
    """Deterministic serialization (sorted keys)."""
    return json.dumps(data, indent=2, sort_keys=True)


def save_report(data, output_path, timestamp=True):
    """
    Save a report to a JSON file.

    Args:
        data (dict): Report
        output_path (str): Output file path
        timestamp (bool): Add metadata.saved_at

    Returns:
        bool: Success status
    """
    try:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        data = dict(data)
        data["metadata"] = {"version": REPORT_VERSION}
        if timestamp:
            data["metadata"]["saved_at"] = datetime.datetime.now().isoformat()
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(dumps_report(data))
            f.write("\n")
        logger.debug("report written to %s", output_path)
        return True
    except Exception as e:
        logger.warning("Error saving report %s: %s", output_path, e)
        return False


def load_report(input_path):
    """
    Load a report from a JSON file.

    Args:
        input_path (str): Input file path

    Returns:
        dict: Report or None if error
    """
    try:
        if not os.path.exists(input_path):
            logger.warning("Report file not found: %s", input_path)
            return None
        with open(input_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except Exception as e:
        logger.warning("Error loading report %s: %s", input_path, e)
        return None


def save_csv(rows, output_path, columns=None):
    """
    Save flat rows to CSV; list values are joined with spaces.

    Returns:
        bool: Success status
    """
    try:
        directory = os.path.dirname(output_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        columns = columns or sorted({k for row in rows for k in row})
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                flat = {}
                for key in columns:
                    value = to_jsonable(row.get(key))
                    if isinstance(value, list):
                        value = " ".join(str(v) for v in value)
                    elif isinstance(value, dict):
                        value = json.dumps(value, sort_keys=True)
                    flat[key] = value
                writer.writerow(flat)
        return True
    except Exception as e:
        logger.warning("Error saving CSV %s: %s", output_path, e)
        return False


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(directory, inputs, artifacts):
    """
    Write manifest.json listing each artifact with its sha-256 and status.

    Args:
        directory (str): Bundle directory
        inputs (dict): Run inputs (config)
        artifacts (list): [{"name": file name, "status": ...}]

    Returns:
        str: Manifest path, or None on failure
    """
    entries = []
    for artifact in artifacts:
        entry = dict(artifact)
        path = os.path.join(directory, artifact["name"])
        entry["sha256"] = sha256_file(path) if os.path.exists(path) else None
        entries.append(entry)
    manifest = {
        "inputs": to_jsonable(inputs),
        "versions": versions(),
        "artifacts": entries,
        "complete": all(e["status"] in ("pass", "capped") for e in entries),
    }
    path = os.path.join(directory, "manifest.json")
    return path if save_report(manifest, path, timestamp=False) else None
