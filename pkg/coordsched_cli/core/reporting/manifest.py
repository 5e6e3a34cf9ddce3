"""
Run manifest: which inputs a schedule was computed from.
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from coordsched_cli import __version__
from coordsched_cli.utils.hashing import file_sha256

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Input files, their SHA-256 hashes, the effective configuration and the tool version."""
    app_file: str
    platform_file: Optional[str] = None
    contracts_file: Optional[str] = None
    config: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = __version__
    hashes: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def capture(
        cls,
        app_file: Union[str, Path],
        platform_file: Optional[Union[str, Path]] = None,
        contracts_file: Optional[Union[str, Path]] = None,
        config: Optional[Dict[str, Any]] = None,
    ) -> "RunManifest":
        """Hash the input files as they are now."""
        manifest = cls(
            app_file=str(app_file),
            platform_file=str(platform_file) if platform_file else None,
            contracts_file=str(contracts_file) if contracts_file else None,
            config=dict(config or {}),
        )
        for name in manifest.files():
            manifest.hashes[name] = file_sha256(name)
        return manifest

    def files(self) -> List[str]:
        return [f for f in (self.app_file, self.platform_file, self.contracts_file) if f]

    def drift(self, current: "RunManifest") -> List[str]:
        """
        Compare recorded hashes with ``current`` (positionally: app, platform, contracts).

        Returns:
            One message per input whose content changed
        """
        messages = []
        for role in ("app_file", "platform_file", "contracts_file"):
            recorded_path = getattr(self, role)
            current_path = getattr(current, role)
            if not recorded_path or not current_path:
                continue
            recorded = self.hashes.get(recorded_path)
            now = current.hashes.get(current_path)
            if recorded and now and recorded != now:
                messages.append(
                    f"{role.replace('_', ' ')} {current_path} differs from the one the schedule was made from "
                    f"({recorded_path}: sha256 {recorded[:12]}..., now {now[:12]}...)"
                )
        return messages

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), default_flow_style=False, sort_keys=False)
