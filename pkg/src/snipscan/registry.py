"""Catalog of security libraries used to decide snippet relevance.

Ships with a bundled JSON registry covering the JCA/JCE, JSSE, JAAS,
BouncyCastle/SpongyCastle, Apache TLS/SSL, keyczar, jasypt and GNU
Crypto surfaces, plus a small non-security "platform" section whose only
job is making ambiguous simple names (Base64) resolvable-and-droppable.
The package blacklist lists prefixes whose classes never count as
security indicators; a custom registry file can replace all of it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = ["ApiClass", "ApiRegistry", "LibrarySpec", "RegistryError", "load_registry"]


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class ApiClass:
    fqn: str
    simple_name: str
    methods: frozenset[str]
    fields: frozenset[str]
    library: str
    security: bool = True
    marker_only: bool = False

    @property
    def package(self) -> str:
        return self.fqn.rsplit(".", 1)[0]


@dataclass(frozen=True)
class LibrarySpec:
    name: str
    classes: tuple[ApiClass, ...]
    security: bool = True


@dataclass
class ApiRegistry:
    libraries: tuple[LibrarySpec, ...]
    blacklist_packages: frozenset[str]
    version: int = 1
    _by_simple: dict[str, list[ApiClass]] = field(default_factory=dict, repr=False)
    _by_fqn: dict[str, ApiClass] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for lib in self.libraries:
            for cls in lib.classes:
                if cls.fqn in self._by_fqn:
                    raise RegistryError(f"duplicate class FQN {cls.fqn}")
                self._by_fqn[cls.fqn] = cls
                self._by_simple.setdefault(cls.simple_name, []).append(cls)
        for cls in self._by_fqn.values():
            if not cls.methods and not cls.marker_only:
                raise RegistryError(
                    f"{cls.fqn} has no methods and is not flagged marker-only"
                )
            if cls.security and self.is_blacklisted(cls.package):
                raise RegistryError(
                    f"blacklist covers security class {cls.fqn}"
                )

    def candidates(self, simple_name: str) -> list[ApiClass]:
        return list(self._by_simple.get(simple_name, []))

    def by_fqn(self, fqn: str) -> ApiClass | None:
        return self._by_fqn.get(fqn)

    def is_blacklisted(self, package: str) -> bool:
        return any(
            package == p or package.startswith(p + ".")
            for p in self.blacklist_packages
        )

    def simple_names(self) -> frozenset[str]:
        return frozenset(self._by_simple)


def _parse(data: dict) -> ApiRegistry:
    libs = []
    for lib in data["libraries"]:
        lib_security = bool(lib.get("security", True))
        classes = tuple(
            ApiClass(
                fqn=c["fqn"],
                simple_name=c["fqn"].rsplit(".", 1)[1],
                methods=frozenset(c.get("methods", [])),
                fields=frozenset(c.get("fields", [])),
                library=lib["name"],
                security=lib_security and bool(c.get("security", True)),
                marker_only=bool(c.get("marker_only", False)),
            )
            for c in lib["classes"]
        )
        libs.append(LibrarySpec(name=lib["name"], classes=classes, security=lib_security))
    return ApiRegistry(
        libraries=tuple(libs),
        blacklist_packages=frozenset(data.get("blacklist", [])),
        version=int(data.get("version", 1)),
    )


def load_registry(path: str | Path | None = None) -> ApiRegistry:
    """Load a registry JSON file; without a path, the bundled one."""
    if path is None:
        text = resources.files("snipscan.data").joinpath("registry.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"registry is not valid JSON: {exc}") from exc
    return _parse(data)
