"""Risk-layer publication and the scenario HTTP endpoint."""

from urbanrisk.service.store import LayerStore, RiskLayer, build_risk_layer
from urbanrisk.service.app import ServiceState, create_app

__all__ = ["RiskLayer", "LayerStore", "build_risk_layer", "ServiceState", "create_app"]
