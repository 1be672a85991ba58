"""
Machine-readable report emitted by every command.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass
class RunReport:
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    counts: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    # worker settings; results never depend on them
    runtime: Dict[str, Any] = field(default_factory=dict)

    def stable_part(self) -> dict:
        """Everything except timings and runtime"""
        return {
            "command": self.command,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "counts": self.counts,
        }

    @property
    def digest(self) -> str:
        canonical = json.dumps(self.stable_part(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        document = self.stable_part()
        document["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        document["runtime"] = self.runtime
        document["digest"] = self.digest
        return document

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
