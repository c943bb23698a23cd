"""
Run configuration for one CLI invocation.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from app.constants import Command, Precision


@dataclass
class RunConfig:
    """
    Fully resolved configuration of a command: flags > environment >
    config file > defaults.
    """

    command: Command
    output_path: str
    cache_dir: str
    k: Optional[int] = None
    y: Optional[float] = None
    z: Optional[int] = None
    precision: Precision = Precision.DOUBLE_DOUBLE
    threads: int = 1
    params: Dict[str, Any] = field(default_factory = dict)

    def __repr__(self) -> str:
        return f"<RunConfig(command={self.command.value}, k={self.k}, params={self.params})>"

    def get(self, name: str, default: Any = None) -> Any:
        """Read a command-specific parameter."""
        return self.params.get(name, default)

    def to_dict(self) -> dict:
        """
        Convert config to dictionary representation (echoed into reports).

        Thread count and output path are left out: they do not change results.
        """
        return {
            'command': self.command.value,
            'k': self.k,
            'y': self.y,
            'z': self.z,
            'precision': self.precision.value,
            'params': dict(sorted(self.params.items()))
        }
