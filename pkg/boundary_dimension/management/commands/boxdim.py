from boundary_dimension.boxdim import BOURDON, SPHERICAL, endpoint_cloud, estimate_box_dimension
from boundary_dimension.hyperbolic import parabolic_orbit
from boundary_dimension.management.base import ComputationCommand


class Command(ComputationCommand):
    help = 'Lower and upper box dimension of an end point set or a boundary orbit'
    subcommand = 'boxdim'

    def run(self, config):
        source = config.choice('boxdim.source', ('partition', 'orbit'), 'partition')
        metric = config.choice('boxdim.metric', (SPHERICAL, BOURDON), SPHERICAL)
        if source == 'partition':
            cloud = endpoint_cloud(self.partition(config))
        else:
            group = self.group(config)
            radius = config.integer('orbit.radius', minimum=1)
            self.truncations['orbit.radius'] = radius
            cloud = parabolic_orbit(group, self.boundary_point(config, group), radius, config.threads)
        estimate = estimate_box_dimension(cloud, self.deltas(config, 'boxdim'), metric, config.threads)

        writer = self.writer
        writer.write_csv('boxdim.csv', estimate.table())
        writer.write_json('boxdim.json', {
            'cloud': repr(cloud),
            'metric': metric,
            'lower_dim': estimate.lower_dim,
            'upper_dim': estimate.upper_dim,
            'regression_slope': estimate.regression_slope,
            'window': estimate.window,
            'window_slopes': estimate.window_slopes,
            'residuals': estimate.residuals,
            'saturated': estimate.saturated,
            'delta_range': estimate.delta_range,
        })
        return f'{cloud.provenance}: box dimension in [{estimate.lower_dim:.4f}, {estimate.upper_dim:.4f}]'
