#!/usr/bin/env python3
"""Regenerates data/port_frequency.csv and data/iana_assigned_ports.csv.

The frequency column is synthetic: ports are ranked by hand (commonly seen
TCP services first) and given a Zipf-like weight by rank. Only the ranking
matters to the port scanner.
"""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

RANKED = [
    80, 23, 443, 21, 22, 25, 3389, 110, 445, 139, 143, 53, 135, 3306, 8080,
    1723, 111, 995, 993, 5900, 1025, 587, 8888, 199, 1720, 465, 548, 113, 81,
    6001, 10000, 514, 5060, 179, 1026, 2000, 8443, 8000, 32768, 554, 26, 1433,
    49152, 2001, 515, 8008, 49154, 1027, 5666, 646, 5000, 5631, 631, 49153,
    8081, 2049, 88, 79, 5800, 106, 2121, 1110, 49155, 6000, 513, 990, 5357,
    427, 49156, 543, 544, 5101, 144, 7, 389, 8009, 3128, 444, 9999, 5009,
    7070, 5190, 3000, 5432, 1900, 3986, 13, 1029, 9, 5051, 6646, 49157, 1028,
    873, 1755, 2717, 4899, 9100, 119, 37, 1000, 3001, 5001, 82, 10010, 1030,
    9090, 2107, 1024, 2103, 6004, 1801, 5050, 19, 8031, 1041, 255, 2967,
    1049, 1048, 1053, 3703, 1056, 1065, 1064, 1054, 17, 808, 3689, 1031,
    1044, 1071, 5901, 100, 9102, 8010, 2869, 1039, 5120, 4001, 9000, 2105,
    636, 1038, 2601, 1, 7000, 1066, 1069, 625, 311, 280, 254, 4000, 1993,
    1761, 5003, 2002, 2005, 1998, 1032, 1050, 6112, 3690, 1521, 2161, 6002,
    1080, 2401, 4045, 902, 7937, 787, 1058, 2383, 32771, 1033, 1040, 1059,
    50000, 5555, 10001, 1494, 593, 2301, 3, 1, 3268, 7938, 1234, 1022, 1074,
    8002, 1036, 1035, 9001, 1037, 464, 497, 1935, 6666, 2003, 6543, 1352,
    24, 3269, 1111, 407, 500, 20, 2006, 3260, 15000, 1218, 1034, 4444, 264,
    2004, 33, 1042, 42510, 999, 3052, 1023, 1068, 222, 7100, 888, 563, 1717,
    2008, 992, 32770, 5802, 1801, 8082, 2007, 3283, 912, 1433, 27017, 6379,
    11211, 9200, 5672, 1883, 8883, 5984, 9042, 7001, 7002, 8088, 8888, 9443,
    10443, 161, 162, 69, 123, 137, 138, 520, 1812, 1813, 2375, 2376, 5601,
    6443, 9092, 2181, 4369, 25565, 27015, 3478, 5349, 8200, 8500, 8600,
]


def ranked_ports():
    seen = set()
    out = []
    for p in RANKED:
        if p not in seen:
            seen.add(p)
            out.append(p)
    # pad with the remaining low ports, then a stride through the registered range
    for p in list(range(1, 1024)) + list(range(1024, 49152, 37)):
        if len(out) >= 1200:
            break
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


IANA = {
    1: "tcpmux", 5: "rje", 7: "echo", 9: "discard", 11: "systat", 13: "daytime",
    17: "qotd", 18: "msp", 19: "chargen", 20: "ftp-data", 21: "ftp", 22: "ssh",
    23: "telnet", 25: "smtp", 37: "time", 42: "nameserver", 43: "whois",
    49: "tacacs", 53: "domain", 67: "bootps", 68: "bootpc", 69: "tftp",
    70: "gopher", 79: "finger", 80: "http", 81: "hosts2-ns", 82: "xfer",
    88: "kerberos", 101: "hostname", 102: "iso-tsap", 104: "acr-nema",
    106: "3com-tsmux", 107: "rtelnet", 109: "pop2", 110: "pop3", 111: "sunrpc",
    113: "auth", 115: "sftp", 117: "uucp-path", 119: "nntp", 123: "ntp",
    135: "epmap", 137: "netbios-ns", 138: "netbios-dgm", 139: "netbios-ssn",
    143: "imap", 144: "uma", 161: "snmp", 162: "snmptrap", 170: "print-srv",
    177: "xdmcp", 179: "bgp", 194: "irc", 199: "smux", 201: "at-rtmp",
    209: "qmtp", 210: "z39-50", 213: "ipx", 218: "mpp", 220: "imap3",
    254: "unassigned-254", 255: "unassigned-255", 264: "bgmp", 280: "http-mgmt",
    311: "asip-webadmin", 318: "pkix-timestamp", 350: "matip-type-a",
    369: "rpc2portmap", 370: "codaauth2", 383: "hp-alarm-mgr", 384: "arns",
    387: "aurp", 389: "ldap", 401: "ups", 407: "timbuktu", 427: "svrloc",
    443: "https", 444: "snpp", 445: "microsoft-ds", 464: "kpasswd",
    465: "submissions", 497: "retrospect", 500: "isakmp", 502: "mbap",
    504: "citadel", 510: "fcp", 512: "exec", 513: "login", 514: "shell",
    515: "printer", 517: "talk", 518: "ntalk", 520: "efs", 521: "ripng",
    524: "ncp", 525: "timed", 530: "courier", 531: "conference", 532: "netnews",
    533: "netwall", 540: "uucp", 542: "commerce", 543: "klogin", 544: "kshell",
    546: "dhcpv6-client", 547: "dhcpv6-server", 548: "afpovertcp", 550: "new-rwho",
    554: "rtsp", 556: "remotefs", 560: "rmonitor", 561: "monitor", 563: "nntps",
    587: "submission", 591: "http-alt", 593: "http-rpc-epmap", 604: "tunnel",
    623: "asf-rmcp", 625: "dec-dlm", 631: "ipp", 635: "rlzdbase", 636: "ldaps",
    639: "msdp", 641: "repcmd", 646: "ldp", 647: "dhcp-failover", 648: "rrp",
    651: "ieee-mms", 653: "repscmd", 654: "aodv", 655: "tinc", 657: "rmc",
    660: "mac-srvr-admin", 666: "doom", 674: "acap", 688: "realm-rusd",
    690: "vatp", 691: "msexch-routing", 694: "ha-cluster", 695: "ieee-mms-ssl",
    698: "olsr", 700: "epp", 701: "lmp", 702: "iris-beep", 706: "silc",
    711: "cisco-tdp", 712: "tbrpf", 749: "kerberos-adm", 750: "kerberos-iv",
    753: "rrh", 754: "tell", 760: "ns", 782: "hp-managed-node",
    783: "spamassassin", 800: "mdbs-daemon", 802: "mbap-s", 808: "ccproxy-http",
    829: "pkix-3-ca-ra", 830: "netconf-ssh", 831: "netconf-beep",
    832: "netconfsoaphttp", 833: "netconfsoapbeep", 847: "dhcp-failover2",
    848: "gdoi", 853: "domain-s", 860: "iscsi", 861: "owamp-control",
    862: "twamp-control", 873: "rsync", 886: "iclcnet-locate",
    887: "iclcnet-svinfo", 888: "accessbuilder", 897: "unassigned-897",
    898: "unassigned-898", 902: "ideafarm-door", 903: "ideafarm-panic",
    953: "rndc", 989: "ftps-data", 990: "ftps", 991: "nas", 992: "telnets",
    993: "imaps", 995: "pop3s", 996: "vsinet", 997: "maitrd", 998: "busboy",
    999: "garcon", 1000: "cadlock2", 1010: "surf", 1023: "reserved",
    1025: "blackjack", 1026: "cap", 1027: "reserved", 1028: "reserved",
    1029: "solid-mux", 1080: "socks", 1099: "rmiregistry", 1110: "nfsd-keepalive",
    1194: "openvpn", 1214: "kazaa", 1234: "search-agent", 1241: "nessus",
    1270: "opsmgr", 1293: "ipsec", 1311: "rxmon", 1337: "menandmice-dns",
    1352: "lotusnote", 1433: "ms-sql-s", 1434: "ms-sql-m", 1494: "ica",
    1521: "ncube-lm", 1645: "sightline", 1701: "l2f", 1720: "h323hostcall",
    1723: "pptp", 1755: "ms-streaming", 1801: "msmq", 1812: "radius",
    1813: "radius-acct", 1883: "mqtt", 1900: "ssdp", 1935: "macromedia-fcs",
    1993: "snmp-tcp-port", 2000: "cisco-sccp", 2049: "nfs", 2082: "infowave",
    2083: "radsec", 2086: "gnunet", 2087: "eli", 2095: "nbx-ser",
    2096: "nbx-dir", 2121: "scientia-ssdb", 2181: "eforward", 2375: "docker",
    2376: "docker-s", 2401: "cvspserver", 2483: "ttc", 2484: "ttc-ssl",
    2967: "ssc-agent", 3000: "hbci", 3128: "ndl-aas", 3260: "iscsi-target",
    3268: "msft-gc", 3269: "msft-gc-ssl", 3283: "net-assistant", 3306: "mysql",
    3389: "ms-wbt-server", 3478: "stun", 3689: "daap", 3690: "svn",
    3986: "mapper-ws-ethd", 4000: "terabase", 4045: "npp", 4369: "epmd",
    4444: "nv-video", 4500: "ipsec-nat-t", 4899: "radmin-port", 5000: "commplex-main",
    5001: "commplex-link", 5060: "sip", 5061: "sips", 5190: "aol",
    5222: "xmpp-client", 5269: "xmpp-server", 5349: "stuns", 5353: "mdns",
    5357: "wsdapi", 5432: "postgresql", 5631: "pcanywheredata",
    5666: "nrpe", 5672: "amqp", 5800: "vnc-http", 5900: "rfb", 5984: "couchdb",
    6000: "x11", 6001: "x11-1", 6002: "x11-2", 6379: "redis", 6443: "sun-sr-https",
    6514: "syslog-tls", 6543: "mythtv", 6646: "unassigned-6646",
    6666: "ircu", 6667: "ircu-3", 7000: "afs3-fileserver", 7001: "afs3-callback",
    7002: "afs3-prserver", 7070: "arcp", 8000: "irdmi", 8008: "http-alt",
    8009: "nvme-disc", 8080: "http-alt", 8081: "sunproxyadmin", 8088: "radan-http",
    8200: "trivnet1", 8443: "pcsync-https", 8500: "fmtp", 8600: "asterix",
    8883: "secure-mqtt", 8888: "ddi-tcp-1", 9000: "cslistener", 9001: "etlservicemgr",
    9042: "cassandra-cql", 9090: "websm", 9092: "xmltec-xmlmail", 9100: "pdl-datastream",
    9200: "wap-wsp", 9443: "tungsten-https", 9999: "distinct", 10000: "ndmp",
    11211: "memcache", 15000: "hydap", 25565: "minecraft", 27017: "mongodb",
}
# entries tagged unassigned-* above are documented gaps; drop them
IANA = {p: n for p, n in IANA.items() if not n.startswith(("unassigned", "reserved"))}


def main():
    ports = ranked_ports()
    lines = ["port,frequency"]
    for rank, port in enumerate(ports, start=1):
        lines.append(f"{port},{0.48 / rank ** 1.1:.8f}")
    (ROOT / "data" / "port_frequency.csv").write_text("\n".join(lines) + "\n")

    lines = ["port,name"]
    for port in sorted(IANA):
        lines.append(f"{port},{IANA[port]}")
    (ROOT / "data" / "iana_assigned_ports.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
