import logging
import os

logger = logging.getLogger(__name__)

_configured = False


def setup_observability(service_name: str = "tba") -> bool:
    """
    Configures tracing through the OpenTelemetry distro when an exporter
    endpoint is set. Without OTEL_EXPORTER_OTLP_ENDPOINT the OpenTelemetry API
    stays a no-op, so spans opened by the engines cost nothing.
    """
    global _configured
    if _configured:
        return True
    if not os.environ.get("OTEL_EXPORTER_OTLP_ENDPOINT"):
        logger.debug("[%s] No OTLP endpoint set; tracing disabled.", service_name)
        return False

    os.environ.setdefault("OTEL_SERVICE_NAME", service_name)
    # traces only
    os.environ.setdefault("OTEL_METRICS_EXPORTER", "none")
    os.environ.setdefault("OTEL_LOGS_EXPORTER", "none")
    try:
        # The distro pulls in the grpc exporter, so it is imported lazily.
        from opentelemetry.distro import OpenTelemetryConfigurator, OpenTelemetryDistro

        OpenTelemetryDistro().configure()
        OpenTelemetryConfigurator().configure()
        _configured = True
        logger.info("[%s] OpenTelemetry configured successfully.", service_name)
        return True
    except Exception as e:
        logger.warning("[%s] Failed to configure OpenTelemetry: %s", service_name, e)
        return False
