from boundary_dimension.hyperbolic import parabolic_orbit
from boundary_dimension.management.base import ComputationCommand


class Command(ComputationCommand):
    help = 'Orbit of a boundary point under a parabolic group, on the boundary sphere of the ball'
    subcommand = 'orbit'

    def run(self, config):
        group = self.group(config)
        radius = config.integer('orbit.radius', minimum=1)
        self.truncations['orbit.radius'] = radius
        cloud = parabolic_orbit(group, self.boundary_point(config, group), radius, config.threads)
        columns = [f'x{index}' for index in range(cloud.points.shape[1])]
        self.writer.write_csv('orbit.csv', [dict(zip(columns, point)) for point in cloud.points.tolist()], columns)
        return f'{group}: {cloud.size} orbit points'
