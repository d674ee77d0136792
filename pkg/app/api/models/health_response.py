"""
HealthResponse data model
"""
from typing import Any, Dict, Optional


class HealthResponse:
    """Status of the gRSK service with library versions and thread settings"""

    def __init__(self, status: str = "healthy", version: str = "", system_info: Optional[Dict[str, Any]] = None,
                 services: Optional[Dict[str, bool]] = None):
        self.status = status
        self.version = version
        self.system_info = system_info if system_info is not None else {}
        self.services = services if services is not None else {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status,
            'version': self.version,
            'system_info': self.system_info,
            'services': self.services
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HealthResponse':
        return cls(
            status=data.get('status', 'healthy'),
            version=data.get('version', ''),
            system_info=data.get('system_info', {}),
            services=data.get('services', {})
        )
