"""OpenTelemetry wiring for traces and metrics.

Design:
- Emit traces for critical spans (CLI command, simulation run, sweep).
- Emit metrics for simulated slots, run latency and quadrature calls.
- Fail OPEN: without an endpoint, or if the exporter cannot be built, the
  API's no-op providers are used and the toolkit runs unchanged.
"""
from __future__ import annotations

from opentelemetry import metrics, trace

from src.config import settings

if settings.OTEL_ENDPOINT:
    try:
        from opentelemetry.exporter.otlp.proto.grpc.metric_exporter import OTLPMetricExporter
        from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
        from opentelemetry.sdk.metrics import MeterProvider
        from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader
        from opentelemetry.sdk.resources import Resource
        from opentelemetry.sdk.trace import TracerProvider
        from opentelemetry.sdk.trace.export import BatchSpanProcessor

        resource = Resource.create({"service.name": settings.SERVICE_NAME})

        # Traces
        _tracer_provider = TracerProvider(resource=resource)
        _tracer_provider.add_span_processor(
            BatchSpanProcessor(OTLPSpanExporter(endpoint=settings.OTEL_ENDPOINT))
        )
        trace.set_tracer_provider(_tracer_provider)

        # Metrics
        _metric_reader = PeriodicExportingMetricReader(
            OTLPMetricExporter(endpoint=settings.OTEL_ENDPOINT)
        )
        metrics.set_meter_provider(
            MeterProvider(resource=resource, metric_readers=[_metric_reader])
        )
    except Exception:
        # No-op fallback (keeps the toolkit functional even if OTel is misconfigured)
        pass

tracer = trace.get_tracer(__name__)
meter = metrics.get_meter(__name__)

# Business metrics (names are stable to ease dashboarding)
sim_slots_total = meter.create_counter("gwdiv_sim_slots_total")
sim_run_ms = meter.create_histogram("gwdiv_sim_run_ms")
quad_calls_total = meter.create_counter("gwdiv_quad_calls_total")
