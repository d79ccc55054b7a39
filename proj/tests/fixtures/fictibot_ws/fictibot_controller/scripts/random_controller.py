#!/usr/bin/env python
import random

import rospy
from std_msgs.msg import Float64


def on_odom(msg):
    rospy.logdebug("odometry %f", msg.data)


def main():
    rospy.init_node("random_controller")
    rate = rospy.get_param("~rate", 10)
    topic = rospy.get_param("~topic", "cmd")
    msg_type = Float64
    pub = rospy.Publisher(topic, msg_type, queue_size=1)
    if rospy.get_param("~use_odom", False):
        rospy.Subscriber("odom", Float64, on_odom)
    timer = rospy.Rate(rate)
    while not rospy.is_shutdown():
        pub.publish(Float64(random.uniform(-1.0, 1.0)))
        timer.sleep()


if __name__ == "__main__":
    main()
