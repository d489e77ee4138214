from prometheus_client import CollectorRegistry, Gauge


class Metrics:
    """Prometheus gauges of one batch run, on an own registry written out as a textfile."""

    def __init__(self, app_name: str, command: str):
        app_name, command = app_name.lower(), command.lower().replace("-", "_")
        self.registry = CollectorRegistry()
        self.run = Metrics.Run(app_name, command, self.registry)
        self.mgf = Metrics.Mgf(app_name, command, self.registry)
        self.renewal = Metrics.Renewal(app_name, command, self.registry)
        self.montecarlo = Metrics.MonteCarlo(app_name, command, self.registry)

    class Run:
        def __init__(self, app_name: str, command: str, registry: CollectorRegistry):
            self.duration_sec = Gauge("run_duration_sec", "Command execution time",
                                      namespace=app_name, subsystem=command, registry=registry)
            self.checks_total = Gauge("run_checks_total", "Number of threshold checks",
                                      namespace=app_name, subsystem=command, registry=registry)
            self.checks_failed = Gauge("run_checks_failed", "Number of failed threshold checks",
                                       namespace=app_name, subsystem=command, registry=registry)

    class Mgf:
        def __init__(self, app_name: str, command: str, registry: CollectorRegistry):
            self.identity_gap = Gauge("mgf_identity_gap", "Max relative gap of the two MGF routes",
                                      namespace=app_name, subsystem=command, registry=registry)
            self.uniformity = Gauge("mgf_uniformity_statistic", "sup |-eta*t + ln E exp(lam*S(t))|",
                                    namespace=app_name, subsystem=command, registry=registry)

    class Renewal:
        def __init__(self, app_name: str, command: str, registry: CollectorRegistry):
            self.blackwell_gap = Gauge("renewal_blackwell_gap", "Max Blackwell gap over the u grid",
                                       namespace=app_name, subsystem=command, registry=registry)
            self.inequality_ok = Gauge("renewal_inequality_ok", "1 if the renewal inequality held",
                                       namespace=app_name, subsystem=command, registry=registry)

    class MonteCarlo:
        def __init__(self, app_name: str, command: str, registry: CollectorRegistry):
            self.p_hat = Gauge("montecarlo_p_hat", "Last tail probability estimate",
                               namespace=app_name, subsystem=command, registry=registry)
            self.rate = Gauge("montecarlo_rate", "Last rate -ln(p_hat)/x^2",
                              namespace=app_name, subsystem=command, registry=registry)
